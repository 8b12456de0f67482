export { ApiClient, ServiceError, Superseded } from "./api.js";
export { Explorer } from "./app.js";
export { applyScene, bootstrap } from "./dom.js";
export {
  BASE_STROKE,
  MIN_RADIUS,
  QUERY_COLOR,
  RADIUS_SCALE,
  TYPE_COLORS,
  nodeRadius,
  nodeTooltip,
  renderGraph,
  scanLegend,
} from "./scene.js";
export type { Scene, SceneEdge, SceneNode } from "./scene.js";
export type { ContextGraph, GraphEdge, GraphNode } from "./types.js";
export {
  DEFAULT_STATE,
  decodeState,
  encodeState,
  relateRequest,
} from "./viewstate.js";
export type { ViewState } from "./viewstate.js";
