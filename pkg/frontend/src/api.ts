/**
 * Typed client for the practice-scope API.
 *
 * Every request is appended to `log`, which end-to-end tests inspect to
 * assert the app only ever talks to documented endpoints.
 */

import type {
  ApiErrorBody,
  ProgressData,
  RecordingSummary,
  SimilarityData,
} from "./types.js";

export interface RequestLogEntry {
  method: string;
  path: string;
  params: Record<string, string>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody | null,
  ) {
    super(body?.message ?? `HTTP ${status}`);
  }
}

function withQuery(path: string, params: Record<string, string>): string {
  const query = new URLSearchParams(params).toString();
  return query ? `${path}?${query}` : path;
}

export class ApiClient {
  readonly log: RequestLogEntry[] = [];

  constructor(
    private readonly baseUrl = "",
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request(path: string, params: Record<string, string>): Promise<Response> {
    this.log.push({ method: "GET", path, params: { ...params } });
    const response = await this.fetchFn(this.baseUrl + withQuery(path, params));
    if (!response.ok) {
      let body: ApiErrorBody | null = null;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = null;
      }
      throw new ApiError(response.status, body);
    }
    return response;
  }

  async getJson<T>(path: string, params: Record<string, string> = {}): Promise<T> {
    const response = await this.request(path, { ...params, ...(path.startsWith("/api/viz/") ? { format: "json" } : {}) });
    return (await response.json()) as T;
  }

  /** Raw SVG text; the caller must display it unmodified. */
  async getSvg(path: string, params: Record<string, string> = {}): Promise<string> {
    const response = await this.request(path, { ...params, format: "svg" });
    return await response.text();
  }

  players(): Promise<{ players: string[] }> {
    return this.getJson("/api/players");
  }

  exercises(): Promise<{ exercises: string[] }> {
    return this.getJson("/api/exercises");
  }

  recordings(params: Record<string, string> = {}): Promise<{ recordings: RecordingSummary[] }> {
    return this.getJson("/api/recordings", params);
  }

  progressData(params: Record<string, string>): Promise<ProgressData> {
    return this.getJson("/api/viz/progress", params);
  }

  similarityData(exercise: string): Promise<SimilarityData> {
    return this.getJson("/api/viz/similarity", { exercise });
  }
}
