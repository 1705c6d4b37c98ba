/**
 * UI acceptance: replaying the worked concert fixture through the chat
 * controller shows the badge transition anticipating -> excited, a bar
 * chart accounting for 100% of the mass, and a pos/neg sort that matches
 * the declared 16/16 partition.
 */

import { describe, expect, it } from 'vitest';

import { profileBars, totalPercent } from '../src/chart.js';
import { NEGATIVE_EMOTIONS, POSITIVE_EMOTIONS, VOCABULARY } from '../src/partition.js';
import { ChatController } from '../src/state.js';
import { ScreeningResult, TurnResponse } from '../src/types.js';

function profileOf(weights: Record<string, number>): number[] {
  return VOCABULARY.map((label) => weights[label] ?? 0);
}

const screening: ScreeningResult = {
  per_metric: {
    kl: { nearest_reference: 'uniform', value: 0.42, label: 'negative' },
    js: { nearest_reference: 'uniform', value: 0.21, label: 'negative' },
    cs: { nearest_reference: 'uniform', value: 0.61, label: 'negative' },
  },
  combined_label: 'negative',
  distance_rows: [
    { reference: 'uniform', kl: 0.42, js: 0.21, cs: 0.61 },
    { reference: 'gloom', kl: 'inf', js: 0.55, cs: 0.1 },
  ],
  disclaimer: 'Not a diagnostic tool: screening output supports, never replaces, professional assessment.',
};

const fixtureTurns: TurnResponse[] = [
  {
    predicted_emotion: 'anticipating',
    emotion_samples: [
      'excited', 'excited', 'excited',
      'anticipating', 'anticipating', 'anticipating', 'anticipating',
      'anticipating', 'anticipating', 'anticipating',
    ],
    reply: 'What concert was it?',
    profile: profileOf({ excited: 0.3, anticipating: 0.7 }),
    screening,
    turn_index: 0,
  },
  {
    predicted_emotion: 'excited',
    emotion_samples: [
      'excited', 'excited', 'excited', 'excited', 'excited',
      'excited', 'excited', 'excited', 'joyful', 'anticipating',
    ],
    reply: "Wow, that's awesome! I've always wanted to go to a U2 concert!",
    profile: profileOf({ excited: 0.55, anticipating: 0.4, joyful: 0.05 }),
    screening,
    turn_index: 1,
  },
];

class FixtureApi {
  private index = 0;
  async sendTurn(): Promise<TurnResponse> {
    return fixtureTurns[this.index++];
  }
}

describe('criterion 11: fixture replay through the chat UI state', () => {
  it('badge transitions anticipating -> excited', async () => {
    const controller = new ChatController(new FixtureApi(), 's1');
    await controller.sendTurn("I couldn't wait to go to the concert.");
    expect(controller.snapshot().badges).toEqual(['anticipating']);
    await controller.sendTurn('The U2 concert. Tickets were really expensive!');
    expect(controller.snapshot().badges).toEqual(['anticipating', 'excited']);
  });

  it('bar chart sums to 100% after each turn', async () => {
    const controller = new ChatController(new FixtureApi(), 's1');
    await controller.sendTurn('first');
    expect(totalPercent(profileBars(controller.snapshot().profile!, 'canonical'))).toBeCloseTo(100, 9);
    await controller.sendTurn('second');
    expect(totalPercent(profileBars(controller.snapshot().profile!, 'pos-neg'))).toBeCloseTo(100, 9);
  });

  it('pos/neg sort matches the declared 16/16 partition', async () => {
    const controller = new ChatController(new FixtureApi(), 's1');
    await controller.sendTurn('first');
    const bars = profileBars(controller.snapshot().profile!, 'pos-neg');
    expect(bars.slice(0, 16).map((b) => b.label)).toEqual([...POSITIVE_EMOTIONS]);
    expect(bars.slice(16).map((b) => b.label)).toEqual([...NEGATIVE_EMOTIONS]);
    expect(POSITIVE_EMOTIONS).toHaveLength(16);
    expect(NEGATIVE_EMOTIONS).toHaveLength(16);
  });

  it('screening panel payload carries per-metric nearest, combined label, and banner', async () => {
    const controller = new ChatController(new FixtureApi(), 's1');
    await controller.sendTurn('first');
    const snapshot = controller.snapshot().screening!;
    expect(snapshot.per_metric.kl.nearest_reference).toBe('uniform');
    expect(snapshot.combined_label).toBe('negative');
    expect(snapshot.disclaimer).toContain('Not a diagnostic tool');
    expect(snapshot.distance_rows[1].kl).toBe('inf');
  });
});
