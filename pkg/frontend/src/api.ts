// Thin typed client over the bot's JSON API.

import type {
  Attempt,
  DecisionResponse,
  PatchDetail,
  PatchSummary,
  RaceOutcome,
  Stats,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    const text = await response.text();
    let payload: unknown = null;
    try {
      payload = text ? JSON.parse(text) : null;
    } catch {
      throw new ApiError(response.status, `non-JSON response from ${path}`);
    }
    if (!response.ok) {
      const detail =
        payload && typeof payload === "object" && "error" in payload
          ? String((payload as { error: unknown }).error)
          : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  queue(): Promise<PatchSummary[]> {
    return this.request("/api/queue");
  }

  patch(patchId: string): Promise<PatchDetail> {
    return this.request(`/api/patches/${encodeURIComponent(patchId)}`);
  }

  decide(
    patchId: string,
    decision: "approve" | "reject",
    reviewer: string,
  ): Promise<DecisionResponse> {
    return this.request(`/api/patches/${encodeURIComponent(patchId)}/decision`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ decision, reviewer }),
    });
  }

  stats(): Promise<Stats> {
    return this.request("/api/stats");
  }

  attempts(after?: string): Promise<Attempt[]> {
    const query = after ? `?after=${encodeURIComponent(after)}` : "";
    return this.request(`/api/attempts${query}`);
  }

  races(): Promise<RaceOutcome[]> {
    return this.request("/api/races");
  }
}
