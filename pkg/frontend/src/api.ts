/** Typed client for the survey service.
 *
 * Submissions are buffered before the network call and cleared on success,
 * so a crash or network failure leaves the pending response replayable via
 * flushPending(); the server deduplicates by (participantId, taskId), which
 * makes retries safe.
 */

import {
  NextTask,
  ResponsePayload,
  ResultsSummary,
  SubmitResult,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

/** Minimal persistent key-value store (localStorage-compatible subset). */
export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStore implements KeyValueStore {
  private map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.has(key) ? this.map.get(key)! : null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
  removeItem(key: string): void {
    this.map.delete(key);
  }
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

const PENDING_KEY = "planesym.pendingResponse";

export class ServiceClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike,
    private store: KeyValueStore = new MemoryStore(),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  assetUrl(path: string): string {
    return path.startsWith("http") ? path : this.baseUrl + path;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: Parameters<FetchLike>[1] = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const doc = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok) {
      const msg = typeof doc?.error === "string" ? doc.error : `HTTP ${resp.status}`;
      throw new ApiError(resp.status, msg);
    }
    return doc as T;
  }

  async enroll(name: string): Promise<string> {
    const doc = await this.request<{ participantId: string }>(
      "POST",
      "/api/participants",
      { name },
    );
    return doc.participantId;
  }

  async nextTask(participantId: string): Promise<NextTask> {
    return this.request<NextTask>(
      "GET",
      `/api/participants/${encodeURIComponent(participantId)}/next-task`,
    );
  }

  /** Submit a response; the payload stays buffered until the POST succeeds. */
  async submitResponse(payload: ResponsePayload): Promise<SubmitResult> {
    this.store.setItem(PENDING_KEY, JSON.stringify(payload));
    const result = await this.request<SubmitResult>(
      "POST",
      "/api/responses",
      payload,
    );
    this.store.removeItem(PENDING_KEY);
    return result;
  }

  pendingResponse(): ResponsePayload | null {
    const raw = this.store.getItem(PENDING_KEY);
    return raw === null ? null : (JSON.parse(raw) as ResponsePayload);
  }

  /** Re-send a buffered response left over from a failed submit, if any. */
  async flushPending(): Promise<SubmitResult | null> {
    const pending = this.pendingResponse();
    if (pending === null) {
      return null;
    }
    return this.submitResponse(pending);
  }

  async results(): Promise<ResultsSummary> {
    return this.request<ResultsSummary>("GET", "/api/results");
  }

  async close(): Promise<void> {
    await this.request<{ closed: boolean }>("POST", "/api/close");
  }
}
