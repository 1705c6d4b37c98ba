import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiClient, ApiError } from '../src/api.js';

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('ApiClient', () => {
  it('creates sessions with POST /sessions', async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse({ session_id: 'abc' }));
    vi.stubGlobal('fetch', fetchMock);
    const client = new ApiClient('');
    const created = await client.createSession();
    expect(created.session_id).toBe('abc');
    expect(fetchMock).toHaveBeenCalledWith('/sessions', { method: 'POST' });
  });

  it('sends turns as JSON bodies', async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      jsonResponse({
        predicted_emotion: 'sad',
        emotion_samples: ['sad'],
        reply: 'ok',
        profile: [],
        screening: null,
        turn_index: 0,
      }),
    );
    vi.stubGlobal('fetch', fetchMock);
    const client = new ApiClient('http://svc');
    await client.sendTurn('s1', 'hello');
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe('http://svc/sessions/s1/turns');
    expect(init.method).toBe('POST');
    expect(JSON.parse(init.body)).toEqual({ text: 'hello' });
  });

  it('maps error bodies onto ApiError with the status code', async () => {
    const fetchMock = vi
      .fn()
      .mockResolvedValue(jsonResponse({ detail: 'backend unreachable' }, 502));
    vi.stubGlobal('fetch', fetchMock);
    const client = new ApiClient('');
    await expect(client.sendTurn('s1', 'hello')).rejects.toMatchObject({
      message: 'backend unreachable',
      status: 502,
    });
    await expect(client.sendTurn('s1', 'hello')).rejects.toBeInstanceOf(ApiError);
  });

  it('keeps the status text when the error body is not JSON', async () => {
    const fetchMock = vi.fn().mockResolvedValue(
      new Response('plain text', { status: 409, statusText: 'Conflict' }),
    );
    vi.stubGlobal('fetch', fetchMock);
    const client = new ApiClient('');
    await expect(client.getScreening('s1')).rejects.toMatchObject({ status: 409 });
  });
});
