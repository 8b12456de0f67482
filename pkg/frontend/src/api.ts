/**
 * Thin HTTP client over the exploration service.  Fetch is injected so
 * tests can replay recorded responses; at most one context request is
 * considered live — answers to superseded requests are dropped.
 */

import type { ContextGraph, SolutionInfo } from "./types.js";
import { relateRequest, type ViewState } from "./viewstate.js";

export type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export class ServiceError extends Error {
  constructor(public status: number, url: string) {
    super(`service returned ${status} for ${url}`);
  }
}

/** Thrown when a newer request superseded this one before it resolved. */
export class Superseded extends Error {
  constructor() {
    super("request superseded");
  }
}

export class ApiClient {
  private seq = 0;

  constructor(
    private fetcher: FetchLike,
    private base: string = "",
  ) {}

  private async get(url: string): Promise<unknown> {
    const resp = await this.fetcher(this.base + url);
    if (!resp.ok) throw new ServiceError(resp.status, url);
    return resp.json();
  }

  /** Fetch the context graph for a view; stale answers raise Superseded. */
  async relate(state: ViewState): Promise<ContextGraph> {
    const ticket = ++this.seq;
    const body = (await this.get(relateRequest(state))) as ContextGraph;
    if (ticket !== this.seq) throw new Superseded();
    return body;
  }

  async article(recordId: string): Promise<unknown> {
    return this.get(`/article/${encodeURIComponent(recordId)}`);
  }

  async solutions(): Promise<SolutionInfo[]> {
    return (await this.get("/solutions")) as SolutionInfo[];
  }
}
