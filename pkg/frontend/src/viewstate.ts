/**
 * The explorer's entire view is a pure function of (service response,
 * ViewState).  ViewState round-trips through the URL so any view can be
 * shared as a link, and the decoded state issues the identical request.
 */

export interface ViewState {
  input: string;
  show: number;
  fontScale: number;
  types: string[];
  scan: boolean;
}

export const SHOW_MIN = 10;
export const SHOW_MAX = 500;
export const FONT_MIN = 0.5;
export const FONT_MAX = 3.0;

export const DEFAULT_STATE: ViewState = {
  input: "",
  show: 40,
  fontScale: 1.0,
  types: [],
  scan: false,
};

function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}

export function normalize(state: ViewState): ViewState {
  return {
    input: state.input,
    show: Math.round(clamp(state.show, SHOW_MIN, SHOW_MAX)),
    fontScale: clamp(state.fontScale, FONT_MIN, FONT_MAX),
    types: [...state.types].sort(),
    scan: state.scan,
  };
}

/** Serialize to URL query params (shareable link). */
export function encodeState(state: ViewState): string {
  const s = normalize(state);
  const params = new URLSearchParams();
  params.set("input", s.input);
  params.set("show", String(s.show));
  if (s.types.length > 0) params.set("types", s.types.join(","));
  if (s.scan) params.set("scan", "true");
  if (s.fontScale !== 1.0) params.set("font", String(s.fontScale));
  return params.toString();
}

export function decodeState(query: string): ViewState {
  const params = new URLSearchParams(query);
  return normalize({
    input: params.get("input") ?? "",
    show: Number(params.get("show") ?? DEFAULT_STATE.show),
    fontScale: Number(params.get("font") ?? DEFAULT_STATE.fontScale),
    types: (params.get("types") ?? "").split(",").filter((t) => t.length > 0),
    scan: params.get("scan") === "true",
  });
}

/**
 * The service request a state maps to.  Font scale is presentation-only and
 * deliberately excluded, so URL round-trips reproduce the same request.
 */
export function relateRequest(state: ViewState): string {
  const s = normalize(state);
  const params = new URLSearchParams();
  params.set("input", s.input);
  params.set("show", String(s.show));
  if (s.types.length > 0) params.set("types", s.types.join(","));
  if (s.scan) params.set("scan", "true");
  return `/relate?${params.toString()}`;
}
