/** Shapes of the service responses consumed by the explorer. */

export type EntityTypeName =
  | "topical-term"
  | "subject"
  | "author"
  | "journal"
  | "citation"
  | "uat-term"
  | "cluster-id";

export interface GraphNode {
  key: string;
  type: EntityTypeName;
  occurrence: number;
  /** ln(occurrence), precomputed by the service */
  size: number;
  x: number;
  y: number;
}

export interface QueryNode {
  id: string;
  key: string;
  is_query: boolean;
  x: number;
  y: number;
}

export interface GraphEdge {
  source: string;
  target: string;
  weight: number;
  mutual: boolean;
  kind: "node" | "query";
}

export interface RelatedArticle {
  record_id: string;
  title: string;
  similarity: number;
}

export interface ContextGraph {
  query: string;
  query_node: QueryNode | null;
  nodes: GraphNode[];
  edges: GraphEdge[];
  related_articles: RelatedArticle[];
  related_by_type: Record<string, GraphNode[]>;
  note: string;
  external_links: {
    exact: Record<string, string>;
    context: Record<string, string>;
  };
}

export interface SolutionInfo {
  label: string;
  cluster_count: number;
  coverage: number;
}
