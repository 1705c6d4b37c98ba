/**
 * Bar-chart data for the live profile. Pure scaling only: every number
 * shown comes straight from the API payload, multiplied by 100, so the
 * bars always account for 100% of the profile mass.
 */

import { polarityOf, sortOrder, SortMode, VOCABULARY } from './partition.js';

export interface Bar {
  label: string;
  percent: number;
  polarity: 'positive' | 'negative';
}

export function profileBars(profile: number[], mode: SortMode): Bar[] {
  if (profile.length !== VOCABULARY.length) {
    throw new Error(`expected ${VOCABULARY.length} weights, got ${profile.length}`);
  }
  const byLabel = new Map<string, number>();
  VOCABULARY.forEach((label, i) => byLabel.set(label, profile[i]));
  return sortOrder(mode).map((label) => ({
    label,
    percent: (byLabel.get(label) ?? 0) * 100,
    polarity: polarityOf(label),
  }));
}

export function totalPercent(bars: Bar[]): number {
  return bars.reduce((sum, bar) => sum + bar.percent, 0);
}

/** Top-N labels by mass, for the compact badge strip. */
export function topBars(bars: Bar[], n: number): Bar[] {
  return [...bars].sort((a, b) => b.percent - a.percent).slice(0, n);
}
