/** Typed fetch client for the session-service JSON API. */

import { ScreeningResult, SessionCreated, TurnResponse } from './types.js';

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && body.detail) {
        detail = typeof body.detail === 'string' ? body.detail : JSON.stringify(body.detail);
      }
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(detail, response.status);
  }
  return response.json() as Promise<T>;
}

export class ApiClient {
  constructor(readonly baseUrl: string = '') {}

  createSession(): Promise<SessionCreated> {
    return request<SessionCreated>(`${this.baseUrl}/sessions`, { method: 'POST' });
  }

  sendTurn(sessionId: string, text: string): Promise<TurnResponse> {
    return request<TurnResponse>(`${this.baseUrl}/sessions/${sessionId}/turns`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ text }),
    });
  }

  getScreening(sessionId: string): Promise<ScreeningResult> {
    return request<ScreeningResult>(`${this.baseUrl}/sessions/${sessionId}/screening`);
  }

  getProfile(sessionId: string): Promise<{ profile: number[]; prompt_count: number }> {
    return request(`${this.baseUrl}/sessions/${sessionId}/profile`);
  }
}
