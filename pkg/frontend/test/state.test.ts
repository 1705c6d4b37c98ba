import { describe, expect, it } from 'vitest';

import { ChatController } from '../src/state.js';
import { ApiError } from '../src/api.js';
import { TurnResponse } from '../src/types.js';
import { VOCABULARY } from '../src/partition.js';

function profileOf(weights: Record<string, number>): number[] {
  return VOCABULARY.map((label) => weights[label] ?? 0);
}

function turnResponse(emotion: string, reply: string, profile: number[], index: number): TurnResponse {
  return {
    predicted_emotion: emotion,
    emotion_samples: [emotion],
    reply,
    profile,
    screening: null,
    turn_index: index,
  };
}

class QueueApi {
  constructor(private queue: (TurnResponse | ApiError)[]) {}
  calls: string[] = [];

  async sendTurn(_sessionId: string, text: string): Promise<TurnResponse> {
    this.calls.push(text);
    const next = this.queue.shift();
    if (!next) throw new ApiError('script exhausted', 500);
    if (next instanceof ApiError) throw next;
    return next;
  }
}

describe('ChatController', () => {
  it('appends user and assistant entries with the emotion badge', async () => {
    const api = new QueueApi([
      turnResponse('anticipating', 'What concert was it?', profileOf({ anticipating: 0.7, excited: 0.3 }), 0),
    ]);
    const controller = new ChatController(api, 's1');
    expect(await controller.sendTurn('first message')).toBe(true);
    const snapshot = controller.snapshot();
    expect(snapshot.transcript).toHaveLength(2);
    expect(snapshot.transcript[0]).toEqual({ role: 'user', text: 'first message' });
    expect(snapshot.transcript[1].emotion).toBe('anticipating');
    expect(snapshot.badges).toEqual(['anticipating']);
  });

  it('rejects blank input without side effects', async () => {
    const api = new QueueApi([]);
    const controller = new ChatController(api, 's1');
    expect(await controller.sendTurn('   ')).toBe(false);
    expect(api.calls).toHaveLength(0);
  });

  it('locks while a turn is in flight (one at a time)', async () => {
    let release!: (value: TurnResponse) => void;
    const blocked = new Promise<TurnResponse>((resolve) => (release = resolve));
    const api = {
      calls: 0,
      async sendTurn(): Promise<TurnResponse> {
        api.calls += 1;
        return blocked;
      },
    };
    const controller = new ChatController(api, 's1');
    const first = controller.sendTurn('one');
    expect(controller.isPending).toBe(true);
    expect(await controller.sendTurn('two')).toBe(false);
    release(turnResponse('sad', 'ok', profileOf({ sad: 1 }), 0));
    expect(await first).toBe(true);
    expect(api.calls).toBe(1);
    expect(controller.isPending).toBe(false);
  });

  it('a failed turn surfaces a toast and leaves the transcript unchanged', async () => {
    const api = new QueueApi([
      turnResponse('sad', 'ok', profileOf({ sad: 1 }), 0),
      new ApiError('backend unreachable', 502),
    ]);
    const controller = new ChatController(api, 's1');
    const errors: string[] = [];
    controller.onError = (message) => errors.push(message);

    await controller.sendTurn('works');
    const before = controller.snapshot();
    expect(await controller.sendTurn('will fail')).toBe(false);
    const after = controller.snapshot();

    expect(errors).toEqual(['backend unreachable']);
    expect(after.transcript).toEqual(before.transcript);
    expect(after.profile).toEqual(before.profile);
    expect(after.badges).toEqual(before.badges);
    expect(after.pending).toBe(false);
  });

  it('notifies onChange when pending flips', async () => {
    const api = new QueueApi([turnResponse('sad', 'ok', profileOf({ sad: 1 }), 0)]);
    const controller = new ChatController(api, 's1');
    const pendingStates: boolean[] = [];
    controller.onChange = (snapshot) => pendingStates.push(snapshot.pending);
    await controller.sendTurn('hello');
    expect(pendingStates).toEqual([true, false]);
  });
});
