/** Typed client for the session service.  Every transition the UI offers
 * comes from these responses; nothing is synthesized locally. */

import type {
  Dir,
  GraphDoc,
  Kind,
  StateDoc,
  TraceDoc,
  TransitionRow,
} from "./types.js";

export class ApiError extends Error {
  constructor(public readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export interface Api {
  createSession(source: string, semantics: Kind): Promise<StateDoc>;
  getState(id: string): Promise<StateDoc>;
  getTransitions(id: string, dir: Dir): Promise<TransitionRow[]>;
  step(id: string, transitionId: string): Promise<StateDoc>;
  getTrace(id: string): Promise<TraceDoc>;
  getCausality(id: string): Promise<GraphDoc>;
  replayMatches(id: string): Promise<boolean>;
  deleteSession(id: string): Promise<void>;
}

export class Client implements Api {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = fetch,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.base + path, init);
    if (resp.status === 204) {
      return undefined as T;
    }
    const doc = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok) {
      const detail =
        typeof doc?.detail === "string" ? doc.detail : `HTTP ${resp.status}`;
      throw new ApiError(resp.status, detail);
    }
    return doc as T;
  }

  createSession(source: string, semantics: Kind): Promise<StateDoc> {
    return this.request<StateDoc>("POST", "/sessions", { source, semantics });
  }

  getState(id: string): Promise<StateDoc> {
    return this.request<StateDoc>("GET", `/sessions/${id}/state`);
  }

  async getTransitions(id: string, dir: Dir): Promise<TransitionRow[]> {
    const doc = await this.request<{ transitions: TransitionRow[] }>(
      "GET",
      `/sessions/${id}/transitions?dir=${dir}`,
    );
    return doc.transitions;
  }

  step(id: string, transitionId: string): Promise<StateDoc> {
    return this.request<StateDoc>("POST", `/sessions/${id}/step`, {
      transition_id: transitionId,
    });
  }

  getTrace(id: string): Promise<TraceDoc> {
    return this.request<TraceDoc>("GET", `/sessions/${id}/trace`);
  }

  getCausality(id: string): Promise<GraphDoc> {
    return this.request<GraphDoc>("GET", `/sessions/${id}/causality`);
  }

  async replayMatches(id: string): Promise<boolean> {
    const doc = await this.request<{ ok: boolean }>(
      "GET",
      `/sessions/${id}/replay`,
    );
    return doc.ok;
  }

  deleteSession(id: string): Promise<void> {
    return this.request<void>("DELETE", `/sessions/${id}`);
  }
}
