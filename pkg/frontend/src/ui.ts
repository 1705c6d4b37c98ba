/** DOM rendering for the chat pane, profile chart, and screening panel. */

import { Bar } from './chart.js';
import { DistanceRow, ScreeningResult, TranscriptEntry } from './types.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderTranscript(container: HTMLElement, entries: TranscriptEntry[]): void {
  container.replaceChildren();
  for (const entry of entries) {
    const row = el('div', `message ${entry.role}`);
    if (entry.role === 'assistant' && entry.emotion) {
      row.appendChild(el('span', 'emotion-badge', entry.emotion));
    }
    row.appendChild(el('span', 'bubble', entry.text));
    container.appendChild(row);
  }
  container.scrollTop = container.scrollHeight;
}

export function renderChart(container: HTMLElement, bars: Bar[]): void {
  container.replaceChildren();
  for (const bar of bars) {
    const row = el('div', 'bar-row');
    row.appendChild(el('span', 'bar-label', bar.label));
    const track = el('div', 'bar-track');
    const fill = el('div', `bar-fill ${bar.polarity}`);
    fill.style.width = `${Math.min(100, bar.percent)}%`;
    track.appendChild(fill);
    row.appendChild(track);
    row.appendChild(el('span', 'bar-value', `${bar.percent.toFixed(1)}%`));
    container.appendChild(row);
  }
}

function fmt(value: number | 'inf'): string {
  return value === 'inf' ? 'inf' : value.toFixed(3);
}

function distanceTable(rows: DistanceRow[]): HTMLTableElement {
  const table = el('table', 'distance-table');
  const head = table.createTHead().insertRow();
  for (const column of ['reference', 'KL', 'JS', 'CS']) {
    head.appendChild(el('th', undefined, column));
  }
  const body = table.createTBody();
  for (const row of rows) {
    const tr = body.insertRow();
    tr.insertCell().textContent = row.reference;
    tr.insertCell().textContent = fmt(row.kl);
    tr.insertCell().textContent = fmt(row.js);
    tr.insertCell().textContent = fmt(row.cs);
  }
  return table;
}

export function renderScreening(container: HTMLElement, screening: ScreeningResult | null): void {
  container.replaceChildren();
  if (!screening) {
    container.appendChild(el('p', 'muted', 'No screening available (no registry loaded).'));
    return;
  }
  container.appendChild(el('div', 'banner', screening.disclaimer));
  const combined = el(
    'div',
    `combined-label ${screening.combined_label}`,
    `combined: ${screening.combined_label}`,
  );
  container.appendChild(combined);

  const list = el('ul', 'metric-list');
  for (const metric of ['kl', 'js', 'cs'] as const) {
    const decision = screening.per_metric[metric];
    const nearest = decision.nearest_reference ?? 'none';
    list.appendChild(
      el(
        'li',
        `metric ${decision.label}`,
        `${metric}: ${nearest} (${fmt(decision.value)}) -> ${decision.label}`,
      ),
    );
  }
  container.appendChild(list);
  container.appendChild(distanceTable(screening.distance_rows));
}

export function showToast(message: string): void {
  const toast = el('div', 'toast', message);
  document.body.appendChild(toast);
  setTimeout(() => toast.remove(), 4000);
}
