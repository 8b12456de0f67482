/**
 * Explorer controller: owns the ViewState and history, turns user actions
 * into service requests, and hands the resulting scene to a renderer.
 * Holds no index logic — every interaction maps to one service request.
 */

import { ApiClient, Superseded } from "./api.js";
import { renderGraph, type Scene } from "./scene.js";
import type { ContextGraph } from "./types.js";
import {
  DEFAULT_STATE,
  encodeState,
  normalize,
  type ViewState,
} from "./viewstate.js";

export type SceneSink = (scene: Scene, state: ViewState) => void;

export interface ExplorerOptions {
  onUrlChange?: (query: string) => void;
  onError?: (err: Error) => void;
}

export class Explorer {
  state: ViewState = { ...DEFAULT_STATE };
  private back: ViewState[] = [];
  private forward: ViewState[] = [];

  constructor(
    private api: ApiClient,
    private sink: SceneSink,
    private options: ExplorerOptions = {},
  ) {}

  /** Issue the request for the current state and render the answer. */
  private async refresh(): Promise<void> {
    try {
      const graph: ContextGraph = await this.api.relate(this.state);
      this.sink(renderGraph(graph, this.state), this.state);
      this.options.onUrlChange?.(encodeState(this.state));
    } catch (err) {
      if (err instanceof Superseded) return;
      this.options.onError?.(err as Error);
    }
  }

  private push(next: Partial<ViewState>): Promise<void> {
    this.back.push({ ...this.state });
    this.forward = [];
    this.state = normalize({ ...this.state, ...next });
    return this.refresh();
  }

  /** Typed search-box submit. */
  search(input: string): Promise<void> {
    return this.push({ input, scan: false });
  }

  /** Node click: one /relate for the clicked key, filters preserved. */
  clickNode(key: string): Promise<void> {
    return this.push({ input: `[${key}]`, scan: false });
  }

  /** Related-title click: article context view. */
  clickArticle(recordId: string): Promise<unknown> {
    return this.api.article(recordId);
  }

  /** Scan mode across one or more solution prefixes. */
  scan(prefixes: string[]): Promise<void> {
    const input = prefixes.map((p) => `[${p}]`).join(" ");
    return this.push({ input, scan: true });
  }

  setShow(show: number): Promise<void> {
    return this.push({ show });
  }

  setTypes(types: string[]): Promise<void> {
    return this.push({ types });
  }

  /** Font slider is presentation-only: re-render without a new request. */
  setFontScale(fontScale: number): void {
    this.state = normalize({ ...this.state, fontScale });
    this.options.onUrlChange?.(encodeState(this.state));
  }

  canGoBack(): boolean {
    return this.back.length > 0;
  }

  goBack(): Promise<void> {
    const prev = this.back.pop();
    if (!prev) return Promise.resolve();
    this.forward.push({ ...this.state });
    this.state = prev;
    return this.refresh();
  }

  goForward(): Promise<void> {
    const next = this.forward.pop();
    if (!next) return Promise.resolve();
    this.back.push({ ...this.state });
    this.state = next;
    return this.refresh();
  }

  /** Restore a shared-link state without touching history. */
  restore(state: ViewState): Promise<void> {
    this.state = normalize(state);
    return this.refresh();
  }

  /** Retry affordance after a service error. */
  retry(): Promise<void> {
    return this.refresh();
  }
}
