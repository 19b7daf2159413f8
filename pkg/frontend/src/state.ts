// Console state: the view graph mirrors the server snapshot exactly
// (no client-side score synthesis), score_update events recolor nodes
// incrementally, and a per-session score history accumulates for the
// detail panel.

import { bandForScore, colorForScore, DEFAULT_ALERT_THRESHOLD, type Band } from "./color.js";
import type { ConsoleEvent, ScoreUpdatePayload, SnapshotDoc } from "./types.js";

export interface ViewNode {
  id: string;
  kind: string;
  name: string;
  metrics: Record<string, number>;
  score: number | null;
  scoreSource: string;
  shape: string;
  color: string;
  band: Band;
}

export interface ViewEdge {
  src: string;
  dst: string;
  edgeType: string;
}

const KIND_SHAPES: Record<string, string> = {
  Cluster: "hexagon",
  Node: "square",
  Namespace: "diamond",
  Deployment: "triangle",
  StatefulSet: "triangle",
  ReplicaSet: "pentagon",
  Pod: "circle",
  Container: "dot",
  Service: "star",
  Port: "dot",
  Label: "dot",
};

export function shapeForKind(kind: string): string {
  return KIND_SHAPES[kind] ?? "circle";
}

export interface HistoryPoint {
  ts: number;
  score: number;
}

export class ConsoleStore {
  nodes = new Map<string, ViewNode>();
  edges: ViewEdge[] = [];
  history = new Map<string, HistoryPoint[]>();
  alertThreshold = DEFAULT_ALERT_THRESHOLD;
  lastUpdateAt: number | null = null;
  historyLimit = 500;

  applySnapshot(doc: SnapshotDoc): void {
    this.nodes.clear();
    for (const node of doc.nodes) {
      this.nodes.set(node.id, this.viewNode(node.id, node.kind, node.name, node.metrics,
        node.anomaly_score, node.score_source));
      if (node.anomaly_score !== null) {
        this.pushHistory(node.id, doc.taken_at, node.anomaly_score);
      }
    }
    this.edges = doc.edges.map((e) => ({ src: e.src, dst: e.dst, edgeType: e.edge_type }));
  }

  private viewNode(
    id: string,
    kind: string,
    name: string,
    metrics: Record<string, number>,
    score: number | null,
    source: string,
  ): ViewNode {
    return {
      id,
      kind,
      name,
      metrics,
      score,
      scoreSource: source,
      shape: shapeForKind(kind),
      color: colorForScore(score),
      band: bandForScore(score, this.alertThreshold),
    };
  }

  /** Incremental recolor from a score_update event; untouched nodes
   * keep their state, nothing is refetched. */
  applyScoreUpdate(payload: ScoreUpdatePayload): void {
    this.lastUpdateAt = payload.at;
    for (const [id, score] of Object.entries(payload.scores)) {
      const node = this.nodes.get(id);
      if (!node) continue; // unknown id: never invent nodes client-side
      node.score = score;
      node.scoreSource = "model";
      node.color = colorForScore(score);
      node.band = bandForScore(score, this.alertThreshold);
      this.pushHistory(id, payload.at, score);
    }
  }

  applyEvent(event: ConsoleEvent): void {
    if (event.event === "score_update") {
      this.applyScoreUpdate(event.data as unknown as ScoreUpdatePayload);
    }
  }

  private pushHistory(id: string, ts: number, score: number): void {
    let points = this.history.get(id);
    if (!points) {
      points = [];
      this.history.set(id, points);
    }
    points.push({ ts, score });
    if (points.length > this.historyLimit) {
      points.splice(0, points.length - this.historyLimit);
    }
  }

  node(id: string): ViewNode | undefined {
    return this.nodes.get(id);
  }

  nodesOfKind(kind: string): ViewNode[] {
    return [...this.nodes.values()].filter((n) => n.kind === kind);
  }

  neighborsOf(id: string): { node: ViewNode; edgeType: string; direction: "in" | "out" }[] {
    const out: { node: ViewNode; edgeType: string; direction: "in" | "out" }[] = [];
    for (const edge of this.edges) {
      if (edge.src === id) {
        const node = this.nodes.get(edge.dst);
        if (node) out.push({ node, edgeType: edge.edgeType, direction: "out" });
      } else if (edge.dst === id) {
        const node = this.nodes.get(edge.src);
        if (node) out.push({ node, edgeType: edge.edgeType, direction: "in" });
      }
    }
    return out;
  }
}
