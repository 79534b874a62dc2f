// Typed client for the embedding service HTTP API.
//
// Endpoints used:
//   GET  /v1/models      -> [{model_id, full_dim, ladder}, ...]
//   POST /v1/similarity  -> {model_id, dim, scores}
//   GET  /v1/health      -> {status, models_loaded, uptime_seconds}
//
// Failed requests carry a body shaped {"error": {"code": N, "message": s}}
// whose code matches the HTTP status. User text is sent verbatim; any
// normalization is the server's job.

export type Mode = "pair" | "one_vs_three";

export interface ModelInfo {
  model_id: string;
  full_dim: number;
  ladder: number[];
}

export interface SimilarityRequest {
  model_id: string;
  dim: number;
  mode: Mode;
  sentence_a: string;
  sentences_b: string[];
}

export interface SimilarityResponse {
  model_id: string;
  dim: number;
  scores: number[];
}

export interface HealthResponse {
  status: string;
  models_loaded: number;
  uptime_seconds: number;
}

/** Raised for any failed request. status 0 means the network itself failed. */
export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.name = "ApiError";
    this.status = status;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function errorFrom(response: Response): Promise<ApiError> {
  let message = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    if (body && body.error && typeof body.error.message === "string") {
      message = body.error.message;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(response.status, message);
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  /**
   * baseUrl "" keeps requests endpoint-relative so the page works when
   * served from the same origin as the service; pass an absolute URL to
   * point elsewhere. fetchImpl is injectable for tests.
   */
  constructor(baseUrl = "", fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      throw await errorFrom(response);
    }
    return response.json();
  }

  async listModels(): Promise<ModelInfo[]> {
    const body = await this.request("/v1/models");
    if (!Array.isArray(body)) {
      throw new ApiError(0, "model listing was not an array");
    }
    return body as ModelInfo[];
  }

  async similarity(req: SimilarityRequest): Promise<SimilarityResponse> {
    const body = await this.request("/v1/similarity", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    return body as SimilarityResponse;
  }

  async health(): Promise<HealthResponse> {
    return (await this.request("/v1/health")) as HealthResponse;
  }
}
