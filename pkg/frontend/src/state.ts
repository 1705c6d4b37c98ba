/**
 * Chat session state machine. One turn may be in flight at a time: the
 * input stays locked from send to response, and a failed turn leaves the
 * transcript, profile, and screening exactly as they were.
 */

import { ScreeningResult, TranscriptEntry, TurnResponse } from './types.js';

export interface TurnApi {
  sendTurn(sessionId: string, text: string): Promise<TurnResponse>;
}

export interface ChatSnapshot {
  transcript: TranscriptEntry[];
  badges: string[];
  profile: number[] | null;
  screening: ScreeningResult | null;
  pending: boolean;
}

export class ChatController {
  private transcript: TranscriptEntry[] = [];
  private badges: string[] = [];
  private profile: number[] | null = null;
  private screening: ScreeningResult | null = null;
  private pending = false;

  onChange: (snapshot: ChatSnapshot) => void = () => {};
  onError: (message: string) => void = () => {};

  constructor(
    private readonly api: TurnApi,
    readonly sessionId: string,
  ) {}

  snapshot(): ChatSnapshot {
    return {
      transcript: [...this.transcript],
      badges: [...this.badges],
      profile: this.profile ? [...this.profile] : null,
      screening: this.screening,
      pending: this.pending,
    };
  }

  get isPending(): boolean {
    return this.pending;
  }

  /**
   * Send one user turn. Returns false without side effects when the text
   * is blank or another turn is already in flight.
   */
  async sendTurn(text: string): Promise<boolean> {
    if (this.pending || !text.trim()) {
      return false;
    }
    this.pending = true;
    this.onChange(this.snapshot());
    try {
      const turn = await this.api.sendTurn(this.sessionId, text);
      this.transcript.push({ role: 'user', text });
      this.transcript.push({
        role: 'assistant',
        text: turn.reply,
        emotion: turn.predicted_emotion,
      });
      this.badges.push(turn.predicted_emotion);
      this.profile = turn.profile;
      this.screening = turn.screening;
      return true;
    } catch (error) {
      this.onError(error instanceof Error ? error.message : String(error));
      return false;
    } finally {
      this.pending = false;
      this.onChange(this.snapshot());
    }
  }
}
