// Deterministic force-directed layout: seeded initial positions, a
// fixed number of spring/repulsion iterations, no randomness after
// initialization, so one snapshot + one seed always renders the same.

import type { ViewEdge, ViewNode } from "./state.js";

export interface LayoutPoint {
  id: string;
  x: number;
  y: number;
}

/** Small deterministic PRNG (mulberry32). */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface LayoutOptions {
  width?: number;
  height?: number;
  iterations?: number;
  seed?: number;
}

export function forceLayout(
  nodes: ViewNode[],
  edges: ViewEdge[],
  options: LayoutOptions = {},
): LayoutPoint[] {
  const width = options.width ?? 1200;
  const height = options.height ?? 800;
  const iterations = options.iterations ?? 150;
  const rng = mulberry32(options.seed ?? 42);

  const index = new Map<string, number>();
  const xs: number[] = [];
  const ys: number[] = [];
  const sorted = [...nodes].sort((a, b) => (a.id < b.id ? -1 : 1));
  sorted.forEach((node, i) => {
    index.set(node.id, i);
    xs.push((rng() - 0.5) * width * 0.8);
    ys.push((rng() - 0.5) * height * 0.8);
  });

  const links: [number, number][] = [];
  for (const edge of edges) {
    const a = index.get(edge.src);
    const b = index.get(edge.dst);
    if (a !== undefined && b !== undefined) links.push([a, b]);
  }

  const n = sorted.length;
  const repulsion = (width * height) / Math.max(n, 1) / 6;
  const springLength = Math.sqrt((width * height) / Math.max(n, 1)) * 0.9;

  for (let step = 0; step < iterations; step++) {
    const temperature = 0.1 * (1 - step / iterations) + 0.02;
    const fx = new Array<number>(n).fill(0);
    const fy = new Array<number>(n).fill(0);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let dx = xs[i] - xs[j];
        let dy = ys[i] - ys[j];
        const distSq = dx * dx + dy * dy || 0.01;
        const force = repulsion / distSq;
        const dist = Math.sqrt(distSq);
        dx /= dist;
        dy /= dist;
        fx[i] += dx * force;
        fy[i] += dy * force;
        fx[j] -= dx * force;
        fy[j] -= dy * force;
      }
    }
    for (const [a, b] of links) {
      let dx = xs[a] - xs[b];
      let dy = ys[a] - ys[b];
      const dist = Math.sqrt(dx * dx + dy * dy) || 0.1;
      const force = (dist - springLength) * 0.08;
      dx /= dist;
      dy /= dist;
      fx[a] -= dx * force;
      fy[a] -= dy * force;
      fx[b] += dx * force;
      fy[b] += dy * force;
    }
    for (let i = 0; i < n; i++) {
      xs[i] += fx[i] * temperature;
      ys[i] += fy[i] * temperature;
      // gentle centering keeps disconnected pieces on screen
      xs[i] *= 0.995;
      ys[i] *= 0.995;
    }
  }

  return sorted.map((node, i) => ({
    id: node.id,
    x: xs[i] + width / 2,
    y: ys[i] + height / 2,
  }));
}
