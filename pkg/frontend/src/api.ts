import type { ActionSpec, ObjectSummary, Polarity, SynthesisResult } from "./types.js";

export interface CreateSessionResponse {
  id: string;
  objects: ObjectSummary[];
}

export interface ObjectsResponse {
  objects: ObjectSummary[];
  labels: Record<string, Polarity>;
  selection: string[] | null;
  program: string | null;
  version: number;
  image_url: string | null;
}

export interface LabelResponse {
  labels: Record<string, Polarity>;
  matched: string | null;
  version: number;
}

export type SynthesizeResponse =
  | ({ state: "done" } & SynthesisResult)
  | { state: "running"; status_url: string }
  | { state: "error"; error: string };

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchFn = typeof fetch;

/** Thin typed client over the session HTTP API; fetch is injectable so the
 * jsdom test harness can supply node's implementation. */
export class ApiClient {
  constructor(
    private base: string = "",
    private fetchFn: FetchFn = (...args) => globalThis.fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(this.base + path, {
      method,
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data = (await response.json()) as T & { error?: string };
    if (!response.ok && response.status !== 202) {
      throw new ApiError(response.status, data?.error ?? response.statusText);
    }
    return data;
  }

  createSession(datasetJson: string): Promise<CreateSessionResponse> {
    return this.request("POST", "/api/sessions", JSON.parse(datasetJson));
  }

  getObjects(sessionId: string): Promise<ObjectsResponse> {
    return this.request("GET", `/api/sessions/${sessionId}/objects`);
  }

  putClickLabel(
    sessionId: string,
    point: [number, number],
    polarity: Polarity | null,
  ): Promise<LabelResponse> {
    return this.request("PUT", `/api/sessions/${sessionId}/labels`, {
      click: point,
      polarity,
    });
  }

  synthesize(sessionId: string, action: ActionSpec, mode: string): Promise<SynthesizeResponse> {
    return this.request("POST", `/api/sessions/${sessionId}/synthesize`, { action, mode });
  }

  synthesisStatus(sessionId: string): Promise<SynthesizeResponse> {
    return this.request("GET", `/api/sessions/${sessionId}/synthesize/status`);
  }
}
