/** Wire types mirroring the session-service JSON payloads. */

export interface MetricDecision {
  nearest_reference: string | null;
  value: number | 'inf';
  label: 'positive' | 'negative';
}

export interface DistanceRow {
  reference: string;
  kl: number | 'inf';
  js: number | 'inf';
  cs: number | 'inf';
}

export interface ScreeningResult {
  per_metric: Record<'kl' | 'js' | 'cs', MetricDecision>;
  combined_label: 'positive' | 'negative';
  distance_rows: DistanceRow[];
  disclaimer: string;
}

export interface TurnResponse {
  predicted_emotion: string;
  emotion_samples: string[];
  reply: string;
  profile: number[];
  screening: ScreeningResult | null;
  turn_index: number;
}

export interface SessionCreated {
  session_id: string;
}

export interface TranscriptEntry {
  role: 'user' | 'assistant';
  text: string;
  emotion?: string;
}
