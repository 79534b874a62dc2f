import type { SimilarityRequest, SimilarityResponse } from "./api.js";

// In-memory session log. Every number the page displays comes from a
// response recorded here, so any rendered score can be traced back to the
// exact request that produced it. Nothing persists across reloads.

export interface LogEntry {
  seq: number;
  at: string; // ISO timestamp
  request: SimilarityRequest;
  response?: SimilarityResponse;
  error?: string;
}

export class SessionLog {
  private entries: LogEntry[] = [];
  private seq = 0;

  recordResponse(
    request: SimilarityRequest,
    response: SimilarityResponse,
  ): LogEntry {
    const entry: LogEntry = {
      seq: this.seq,
      at: new Date().toISOString(),
      request,
      response,
    };
    this.seq += 1;
    this.entries.push(entry);
    return entry;
  }

  recordError(request: SimilarityRequest, error: string): LogEntry {
    const entry: LogEntry = {
      seq: this.seq,
      at: new Date().toISOString(),
      request,
      error,
    };
    this.seq += 1;
    this.entries.push(entry);
    return entry;
  }

  list(): LogEntry[] {
    return [...this.entries];
  }

  /** True when some recorded response contains this exact raw score. */
  hasScore(value: number): boolean {
    return this.entries.some(
      (e) => e.response !== undefined && e.response.scores.includes(value),
    );
  }
}
