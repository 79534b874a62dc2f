import { ApiError } from "./api.js";
import type { SimilarityRequest, SimilarityResponse } from "./api.js";
import type { SessionLog } from "./log.js";

// Dimension sweep: one pair-mode request per ladder entry so the user can
// watch the score drift as the embedding is truncated. Requests go out
// strictly one at a time, which keeps the table fill order deterministic.

/** Anything that can answer a similarity request; ApiClient qualifies. */
export interface SimilarityCaller {
  similarity(req: SimilarityRequest): Promise<SimilarityResponse>;
}

export interface SweepRow {
  dim: number;
  score?: number;
  error?: string;
}

export async function dimensionSweep(
  client: SimilarityCaller,
  log: SessionLog,
  modelId: string,
  ladder: number[],
  sentenceA: string,
  sentenceB: string,
): Promise<SweepRow[]> {
  const rows: SweepRow[] = [];
  for (const dim of ladder) {
    const request: SimilarityRequest = {
      model_id: modelId,
      dim,
      mode: "pair",
      sentence_a: sentenceA,
      sentences_b: [sentenceB],
    };
    try {
      const response = await client.similarity(request);
      log.recordResponse(request, response);
      rows.push({ dim, score: response.scores[0] });
    } catch (err) {
      // one failed dim must not take down the rest of the sweep
      const message = err instanceof ApiError ? err.message : String(err);
      log.recordError(request, message);
      rows.push({ dim, error: message });
    }
  }
  return rows;
}
