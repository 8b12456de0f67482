/**
 * Pure scene construction: (ContextGraph, ViewState) -> drawable scene.
 * Positions come from the service, so replaying a recorded response yields
 * a stable layout; the DOM layer only applies what is computed here.
 */

import type { ContextGraph, GraphEdge, GraphNode } from "./types.js";
import type { ViewState } from "./viewstate.js";

export const QUERY_COLOR = "#d62728";

/** Fixed palette, one color per entity type. */
export const TYPE_COLORS: Record<string, string> = {
  "topical-term": "#1f77b4",
  subject: "#2ca02c",
  author: "#ff7f0e",
  journal: "#9467bd",
  citation: "#8c564b",
  "uat-term": "#17becf",
  "cluster-id": "#e377c2",
};

export const BASE_STROKE = 1.5;
export const MIN_RADIUS = 4;
export const RADIUS_SCALE = 6;
export const BASE_FONT = 12;
export const QUERY_RADIUS = 8;

export interface SceneNode {
  key: string;
  x: number;
  y: number;
  radius: number;
  color: string;
  fontSize: number;
  tooltip: string;
  isQuery: boolean;
}

export interface SceneEdge {
  source: string;
  target: string;
  strokeWidth: number;
  color: string;
  highlighted: boolean;
}

export interface LegendEntry {
  prefix: string;
  count: number;
}

export interface Scene {
  nodes: SceneNode[];
  edges: SceneEdge[];
  legend: LegendEntry[];
  note: string;
  empty: boolean;
}

export function nodeRadius(node: GraphNode): number {
  return Math.max(MIN_RADIUS, RADIUS_SCALE * node.size);
}

export function nodeTooltip(node: GraphNode): string {
  return `${node.key} (${node.type}): ${node.occurrence} occurrences`;
}

function edgeStroke(edge: GraphEdge): number {
  return edge.mutual ? 2 * BASE_STROKE : BASE_STROKE;
}

/** Link color follows the originating (source) node's type. */
function edgeColor(edge: GraphEdge, byKey: Map<string, GraphNode>): string {
  if (edge.kind === "query") return QUERY_COLOR;
  const origin = byKey.get(edge.source);
  return origin ? TYPE_COLORS[origin.type] ?? "#999999" : "#999999";
}

/** Scan mode: one legend entry per requested prefix, empty prefixes kept. */
export function scanLegend(prefixes: string[], nodes: GraphNode[]): LegendEntry[] {
  return prefixes.map((prefix) => ({
    prefix,
    count: nodes.filter((n) => n.key.startsWith(prefix)).length,
  }));
}

function bracketPrefixes(input: string): string[] {
  const out: string[] = [];
  const re = /\[([^\]]+)\]/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(input)) !== null) out.push(m[1]);
  return out;
}

export function renderGraph(graph: ContextGraph, state: ViewState): Scene {
  const fontSize = BASE_FONT * state.fontScale;
  const byKey = new Map(graph.nodes.map((n) => [n.key, n]));

  const nodes: SceneNode[] = graph.nodes.map((n) => ({
    key: n.key,
    x: n.x,
    y: n.y,
    radius: nodeRadius(n),
    color: TYPE_COLORS[n.type] ?? "#999999",
    fontSize,
    tooltip: nodeTooltip(n),
    isQuery: false,
  }));

  if (graph.query_node && nodes.length > 0) {
    nodes.push({
      key: graph.query_node.id,
      x: graph.query_node.x,
      y: graph.query_node.y,
      radius: QUERY_RADIUS,
      color: QUERY_COLOR,
      fontSize,
      tooltip: graph.query_node.key,
      isQuery: true,
    });
  }

  const edges: SceneEdge[] = graph.edges.map((e) => ({
    source: e.source,
    target: e.target,
    strokeWidth: edgeStroke(e),
    color: edgeColor(e, byKey),
    highlighted: e.kind === "query",
  }));

  const empty = graph.nodes.length === 0;
  const note = empty && !graph.note ? `no results for "${state.input}"` : graph.note;
  const legend = state.scan ? scanLegend(bracketPrefixes(state.input), graph.nodes) : [];

  return { nodes, edges, legend, note, empty };
}
