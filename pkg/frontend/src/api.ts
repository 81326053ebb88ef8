/**
 * Typed client for the recommendation service HTTP API.
 *
 * The client is the frontend's only coupling to the backend: every shape
 * here mirrors a JSON payload the service emits or accepts.
 */

export interface SketchFeature {
  name: string;
  type: "nominal" | "quantitative" | "temporal";
}

export interface TableSketch {
  table_name: string;
  features: SketchFeature[];
  row_count: number;
}

export interface Narrative {
  e1: string;
  e2: string;
  caption: string;
  suggestions: string[];
}

export interface Violation {
  code: string;
  message: string;
  location: string;
}

export interface Recommendation {
  vegazero: string;
  narrative: Narrative;
  doc: Record<string, unknown> | null;
  warnings: Violation[];
  raw_text: string;
}

export interface DatasetHandle {
  id: string;
  sketch: TableSketch;
}

export interface StudyResponseView {
  vegazero: string;
  narrative: Narrative;
  doc: Record<string, unknown> | null;
}

export interface StudySampleView {
  id: string;
  sketch: TableSketch;
  query: string;
  responses: { a: StudyResponseView; b: StudyResponseView };
}

export type StudyNextResult =
  | { done: true }
  | { done: false; sample: StudySampleView };

/** Non-2xx response; `detail` carries the service's error payload. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : `HTTP ${status}`);
    this.name = "ApiError";
  }

  /** Raw model output attached to parse failures, if the service sent one. */
  get rawText(): string | null {
    if (
      this.detail !== null &&
      typeof this.detail === "object" &&
      typeof (this.detail as Record<string, unknown>).raw_text === "string"
    ) {
      return (this.detail as Record<string, string>).raw_text;
    }
    return null;
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: typeof fetch = globalThis.fetch.bind(globalThis),
  ) {}

  private async request<T>(
    method: "GET" | "POST",
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    if (!response.ok) {
      const detail =
        payload !== null && typeof payload === "object" && "detail" in payload
          ? (payload as { detail: unknown }).detail
          : payload;
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  uploadDataset(name: string, csvText: string): Promise<DatasetHandle> {
    return this.request("POST", "/datasets", { name, csv_text: csvText });
  }

  recommend(
    datasetId: string,
    query: string,
    backend: string,
  ): Promise<Recommendation> {
    return this.request("POST", "/recommend", {
      dataset_id: datasetId,
      query,
      backend,
    });
  }

  studyNext(participant: string): Promise<StudyNextResult> {
    return this.request(
      "GET",
      `/study/next?participant=${encodeURIComponent(participant)}`,
    );
  }

  submitRating(
    participantId: string,
    sampleId: string,
    scores: Record<string, number>,
    expertise?: number,
  ): Promise<{ ok: boolean }> {
    return this.request("POST", "/study/rating", {
      participant_id: participantId,
      sample_id: sampleId,
      scores,
      ...(expertise === undefined ? {} : { expertise }),
    });
  }
}
