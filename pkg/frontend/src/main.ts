/** Bootstrap: session id lives in the URL; input locks while a turn runs. */

import { ApiClient } from './api.js';
import { profileBars } from './chart.js';
import { SortMode } from './partition.js';
import { ChatController } from './state.js';
import { renderChart, renderScreening, renderTranscript, showToast } from './ui.js';

async function resolveSessionId(api: ApiClient): Promise<string> {
  const params = new URLSearchParams(window.location.search);
  const existing = params.get('session');
  if (existing) {
    return existing;
  }
  const created = await api.createSession();
  params.set('session', created.session_id);
  const url = `${window.location.pathname}?${params.toString()}`;
  window.history.replaceState(null, '', url);
  return created.session_id;
}

async function boot(): Promise<void> {
  const api = new ApiClient('');
  const sessionId = await resolveSessionId(api);
  const controller = new ChatController(api, sessionId);

  const transcriptEl = document.getElementById('transcript')!;
  const chartEl = document.getElementById('chart')!;
  const screeningEl = document.getElementById('screening')!;
  const input = document.getElementById('chat-input') as HTMLInputElement;
  const send = document.getElementById('send-button') as HTMLButtonElement;
  const sortToggle = document.getElementById('sort-toggle') as HTMLButtonElement;

  let sortMode: SortMode = 'canonical';

  function sync(): void {
    const snapshot = controller.snapshot();
    renderTranscript(transcriptEl, snapshot.transcript);
    if (snapshot.profile) {
      renderChart(chartEl, profileBars(snapshot.profile, sortMode));
    }
    renderScreening(screeningEl, snapshot.screening);
    const locked = snapshot.pending;
    input.disabled = locked;
    send.disabled = locked || !input.value.trim();
  }

  controller.onChange = sync;
  controller.onError = showToast;

  input.addEventListener('input', () => {
    send.disabled = controller.isPending || !input.value.trim();
  });

  async function submit(): Promise<void> {
    const text = input.value;
    if (!text.trim()) {
      return;
    }
    const accepted = await controller.sendTurn(text);
    if (accepted) {
      input.value = '';
    }
    sync();
    input.focus();
  }

  send.addEventListener('click', submit);
  input.addEventListener('keydown', (event) => {
    if (event.key === 'Enter' && !controller.isPending) {
      void submit();
    }
  });

  sortToggle.addEventListener('click', () => {
    sortMode = sortMode === 'canonical' ? 'pos-neg' : 'canonical';
    sortToggle.textContent = `sort: ${sortMode}`;
    sync();
  });

  sync();
}

void boot().catch((error) => showToast(`failed to start: ${error}`));
