/**
 * The 32-emotion vocabulary in canonical (alphabetical) order, and its
 * fixed 16/16 split into commonly-positive and commonly-negative emotions
 * used by the sorted chart view.
 */

export const VOCABULARY: readonly string[] = [
  'afraid', 'angry', 'annoyed', 'anticipating', 'anxious', 'apprehensive',
  'ashamed', 'caring', 'confident', 'content', 'devastated', 'disappointed',
  'disgusted', 'embarrassed', 'excited', 'faithful', 'furious', 'grateful',
  'guilty', 'hopeful', 'impressed', 'jealous', 'joyful', 'lonely',
  'nostalgic', 'prepared', 'proud', 'sad', 'sentimental', 'surprised',
  'terrified', 'trusting',
];

export const POSITIVE_EMOTIONS: readonly string[] = [
  'anticipating', 'caring', 'confident', 'content', 'excited', 'faithful',
  'grateful', 'hopeful', 'impressed', 'joyful', 'nostalgic', 'prepared',
  'proud', 'sentimental', 'surprised', 'trusting',
];

export const NEGATIVE_EMOTIONS: readonly string[] = VOCABULARY.filter(
  (label) => !POSITIVE_EMOTIONS.includes(label),
);

export type SortMode = 'canonical' | 'pos-neg';

/** Label order for the chart under the given sort mode. */
export function sortOrder(mode: SortMode): readonly string[] {
  if (mode === 'canonical') {
    return VOCABULARY;
  }
  return [...POSITIVE_EMOTIONS, ...NEGATIVE_EMOTIONS];
}

export function polarityOf(label: string): 'positive' | 'negative' {
  return POSITIVE_EMOTIONS.includes(label) ? 'positive' : 'negative';
}
