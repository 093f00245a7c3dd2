// Polling loop and decision guard, with injectable timer and client so the
// behavior is testable without a browser or a live API.

import type { ApiClient } from "./api.js";
import { ApiError } from "./api.js";
import type { DecisionResponse, PatchSummary, Stats } from "./types.js";

// The review gate contract: a freshly enqueued patch must show up within
// one poll, and polls are at most 5 seconds apart.
export const POLL_INTERVAL_MS = 3000;

type Scheduler = (fn: () => void, ms: number) => unknown;
type Canceller = (handle: unknown) => void;

export class Poller {
  private handle: unknown = null;
  private running = false;

  constructor(
    private readonly tick: () => Promise<void>,
    private readonly intervalMs: number = POLL_INTERVAL_MS,
    private readonly schedule: Scheduler = (fn, ms) => setTimeout(fn, ms),
    private readonly cancel: Canceller = (h) => clearTimeout(h as number),
  ) {
    if (this.intervalMs > 5000) {
      throw new Error("poll interval must not exceed 5s");
    }
  }

  start(): void {
    if (this.running) return;
    this.running = true;
    const loop = async () => {
      if (!this.running) return;
      await this.tick().catch(() => undefined); // tick reports its own errors
      if (this.running) {
        this.handle = this.schedule(loop, this.intervalMs);
      }
    };
    void loop();
  }

  stop(): void {
    this.running = false;
    if (this.handle !== null) {
      this.cancel(this.handle);
      this.handle = null;
    }
  }
}

export interface DashboardView {
  queue: PatchSummary[];
  stats: Stats | null;
  error: string | null;
  lastUpdated: string | null;
}

export class Dashboard {
  readonly view: DashboardView = {
    queue: [],
    stats: null,
    error: null,
    lastUpdated: null,
  };
  private inFlight = new Set<string>();
  private listeners: Array<() => void> = [];

  constructor(
    private readonly client: ApiClient,
    private readonly clock: () => string = () => new Date().toISOString(),
  ) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  async refresh(): Promise<void> {
    try {
      const [queue, stats] = await Promise.all([
        this.client.queue(),
        this.client.stats(),
      ]);
      this.view.queue = queue;
      this.view.stats = stats;
      this.view.error = null;
      this.view.lastUpdated = this.clock();
    } catch (err) {
      // API unreachable must surface as a banner, never silently.
      this.view.error = err instanceof Error ? err.message : String(err);
    }
    this.emit();
  }

  decisionPending(patchId: string): boolean {
    return this.inFlight.has(patchId);
  }

  /** Submit a decision exactly once per patch: concurrent double-clicks are
   * dropped locally, and a server-side repeat surfaces the API's 409. */
  async decide(
    patchId: string,
    decision: "approve" | "reject",
    reviewer: string,
  ): Promise<DecisionResponse | "in-flight" | "already-decided"> {
    if (this.inFlight.has(patchId)) {
      return "in-flight";
    }
    this.inFlight.add(patchId);
    try {
      const response = await this.client.decide(patchId, decision, reviewer);
      this.view.queue = this.view.queue.filter((p) => p.patch_id !== patchId);
      this.emit();
      return response;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        return "already-decided";
      }
      throw err;
    } finally {
      this.inFlight.delete(patchId);
    }
  }
}
