// Shapes of the engine's HTTP API documents.

export interface NodeDoc {
  id: string;
  kind: string;
  name: string;
  metrics: Record<string, number>;
  anomaly_score: number | null;
  score_source: string;
  last_updated?: number;
}

export interface EdgeDoc {
  src: string;
  dst: string;
  edge_type: string;
}

export interface SnapshotDoc {
  taken_at: number;
  sequence: number;
  nodes: NodeDoc[];
  edges: EdgeDoc[];
}

export interface TraceEntry {
  id: string;
  kind: string;
  name: string;
  anomaly_score: number | null;
  score_source: string;
}

export interface TraceDoc {
  component: TraceEntry;
  host_node: TraceEntry | null;
  replicaset: TraceEntry | null;
  deployment: TraceEntry | null;
  namespace: TraceEntry | null;
  siblings: TraceEntry[];
}

export interface StatusDoc {
  mode: "live" | "simulate" | "replay";
  node_count: number;
  edge_count: number;
  last_event: number;
  update_graph_interval_s: number;
  update_models_interval_s: number;
}

export interface FaultDoc {
  fault_id: string;
  target_pod: string;
  fault_kind: "cpu_hog" | "mem_leak";
  workers: number;
  started_at: number;
  duration: number | null;
}

export interface FieldError {
  field: string;
  message: string;
}

export interface ModelsDoc {
  [kind: string]: {
    version: number;
    trained_at: number;
    unsupervised: string;
    supervised: string;
    training_rows: number;
    flags: string[];
  };
}

export interface ScoreUpdatePayload {
  sequence: number;
  ts: number;
  at: number;
  tick: number;
  scores: Record<string, number>;
  kinds: { kind: string; scored: number; unscored: number; mean_score: number | null }[];
}

export interface ConsoleEvent {
  id: number;
  event: string;
  data: Record<string, unknown>;
}
