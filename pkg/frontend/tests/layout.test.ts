import { describe, expect, it } from "vitest";

import { forceLayout, mulberry32 } from "../src/layout.js";
import { ConsoleStore } from "../src/state.js";
import type { SnapshotDoc } from "../src/types.js";

function snapshot(): SnapshotDoc {
  const nodes = [];
  const edges = [];
  for (let i = 0; i < 12; i++) {
    nodes.push({
      id: `p${i}`,
      kind: "Pod",
      name: `p${i}`,
      metrics: {},
      anomaly_score: null,
      score_source: "none",
    });
    if (i > 0) edges.push({ src: "p0", dst: `p${i}`, edge_type: "MANAGES" });
  }
  return { taken_at: 1, sequence: 1, nodes, edges };
}

describe("deterministic layout", () => {
  it("same snapshot and seed give identical coordinates", () => {
    const store = new ConsoleStore();
    store.applySnapshot(snapshot());
    const a = forceLayout([...store.nodes.values()], store.edges, { seed: 7 });
    const b = forceLayout([...store.nodes.values()], store.edges, { seed: 7 });
    expect(a).toEqual(b);
  });

  it("different seeds give different coordinates", () => {
    const store = new ConsoleStore();
    store.applySnapshot(snapshot());
    const a = forceLayout([...store.nodes.values()], store.edges, { seed: 7 });
    const b = forceLayout([...store.nodes.values()], store.edges, { seed: 8 });
    expect(a).not.toEqual(b);
  });

  it("node order does not affect the result", () => {
    const store = new ConsoleStore();
    store.applySnapshot(snapshot());
    const nodes = [...store.nodes.values()];
    const reversed = [...nodes].reverse();
    const a = forceLayout(nodes, store.edges, { seed: 3 });
    const b = forceLayout(reversed, store.edges, { seed: 3 });
    expect(a).toEqual(b);
  });

  it("keeps every node inside a sane bounding box", () => {
    const store = new ConsoleStore();
    store.applySnapshot(snapshot());
    const points = forceLayout([...store.nodes.values()], store.edges, {
      seed: 1,
      width: 1200,
      height: 800,
    });
    for (const p of points) {
      expect(p.x).toBeGreaterThan(-600);
      expect(p.x).toBeLessThan(1800);
      expect(p.y).toBeGreaterThan(-400);
      expect(p.y).toBeLessThan(1200);
    }
  });
});

describe("mulberry32", () => {
  it("is deterministic and in [0,1)", () => {
    const a = mulberry32(123);
    const b = mulberry32(123);
    for (let i = 0; i < 100; i++) {
      const value = a();
      expect(value).toBe(b());
      expect(value).toBeGreaterThanOrEqual(0);
      expect(value).toBeLessThan(1);
    }
  });
});
