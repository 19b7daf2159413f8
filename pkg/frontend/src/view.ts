// DOM layer: renders the SVG graph and the side panels. All numbers
// shown come straight from store/controls state.

import type { ApiClient } from "./api.js";
import { forceLayout, type LayoutPoint } from "./layout.js";
import type { ConsoleStore } from "./state.js";
import type { ConfigEditor, FaultPanel, RetrainButton } from "./controls.js";
import type { TraceDoc, TraceEntry } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class GraphView {
  private positions = new Map<string, LayoutPoint>();
  private svg: SVGSVGElement;
  onSelect: (id: string) => void = () => undefined;

  constructor(private readonly container: HTMLElement, private readonly store: ConsoleStore) {
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("viewBox", "0 0 1200 800");
    this.container.appendChild(this.svg);
  }

  relayout(seed = 42): void {
    const points = forceLayout([...this.store.nodes.values()], this.store.edges, { seed });
    this.positions = new Map(points.map((p) => [p.id, p]));
  }

  render(selectedId: string | null): void {
    if (this.positions.size !== this.store.nodes.size) {
      this.relayout();
    }
    this.svg.replaceChildren();
    for (const edge of this.store.edges) {
      const a = this.positions.get(edge.src);
      const b = this.positions.get(edge.dst);
      if (!a || !b) continue;
      const line = document.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", String(a.x));
      line.setAttribute("y1", String(a.y));
      line.setAttribute("x2", String(b.x));
      line.setAttribute("y2", String(b.y));
      line.setAttribute("class", "edge");
      this.svg.appendChild(line);
    }
    for (const node of this.store.nodes.values()) {
      const point = this.positions.get(node.id);
      if (!point) continue;
      const g = document.createElementNS(SVG_NS, "g");
      g.setAttribute("transform", `translate(${point.x},${point.y})`);
      g.setAttribute("class", `node band-${node.band}` + (node.id === selectedId ? " selected" : ""));
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("r", node.kind === "Node" ? "14" : node.kind === "Pod" ? "9" : "6");
      circle.setAttribute("fill", node.color);
      if (node.band === "unscored") circle.setAttribute("stroke-dasharray", "2 2");
      g.appendChild(circle);
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `${node.kind} ${node.id}` +
        (node.score !== null ? ` score=${node.score.toFixed(3)}` : " (unscored)");
      g.appendChild(title);
      g.addEventListener("click", () => this.onSelect(node.id));
      this.svg.appendChild(g);
    }
  }
}

function traceRow(label: string, entry: TraceEntry | null): HTMLElement {
  const row = el("div", "trace-row");
  row.appendChild(el("span", "trace-label", label));
  if (entry) {
    const value = el("span", "trace-value", entry.id);
    value.dataset.score = entry.anomaly_score === null ? "" : entry.anomaly_score.toFixed(3);
    row.appendChild(value);
    row.appendChild(
      el("span", "trace-score",
        entry.anomaly_score === null ? "unscored" : entry.anomaly_score.toFixed(3)),
    );
  } else {
    row.appendChild(el("span", "trace-value muted", "-"));
  }
  return row;
}

export class DetailPanel {
  constructor(
    private readonly container: HTMLElement,
    private readonly store: ConsoleStore,
    private readonly api: ApiClient,
  ) {}

  async show(id: string): Promise<void> {
    const node = this.store.node(id);
    this.container.replaceChildren();
    if (!node) return;
    this.container.appendChild(el("h2", undefined, `${node.kind} ${node.name || node.id}`));
    const score = el(
      "p",
      `score band-${node.band}`,
      node.score === null ? "unscored" : `anomaly score ${node.score.toFixed(3)}`,
    );
    this.container.appendChild(score);

    const metrics = el("dl", "metrics");
    for (const [name, value] of Object.entries(node.metrics)) {
      metrics.appendChild(el("dt", undefined, name));
      metrics.appendChild(el("dd", undefined, value.toPrecision(5)));
    }
    this.container.appendChild(metrics);

    const history = this.store.history.get(id) ?? [];
    if (history.length > 1) {
      this.container.appendChild(el("h3", undefined, "score history (session)"));
      this.container.appendChild(renderSparkline(history.map((p) => p.score)));
    }

    if (node.kind === "Pod") {
      const trace = await this.api.trace(id);
      this.container.appendChild(el("h3", undefined, "trace"));
      this.container.appendChild(this.renderTrace(trace));
    }
  }

  renderTrace(trace: TraceDoc): HTMLElement {
    const box = el("div", "trace");
    box.appendChild(traceRow("Host Node", trace.host_node));
    box.appendChild(traceRow("ReplicaSet", trace.replicaset));
    box.appendChild(traceRow("Deployment", trace.deployment));
    box.appendChild(traceRow("Namespace", trace.namespace));
    const siblings = el("div", "trace-siblings");
    siblings.appendChild(el("h4", undefined, `Sibling pods (${trace.siblings.length})`));
    for (const sibling of trace.siblings) {
      siblings.appendChild(traceRow("", sibling));
    }
    box.appendChild(siblings);
    return box;
  }
}

function renderSparkline(values: number[]): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 200 40");
  svg.setAttribute("class", "sparkline");
  const n = values.length;
  const points = values
    .map((v, i) => `${(i / Math.max(n - 1, 1)) * 200},${40 - v * 38 - 1}`)
    .join(" ");
  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute("points", points);
  svg.appendChild(line);
  return svg;
}

export class ControlsView {
  constructor(
    private readonly container: HTMLElement,
    private readonly faults: FaultPanel,
    private readonly retrain: RetrainButton,
    private readonly config: ConfigEditor,
    private readonly podIds: () => string[],
  ) {}

  render(): void {
    this.container.replaceChildren();
    this.renderRetrain();
    if (this.faults.visible) {
      this.renderFaults();
    }
    this.renderConfig();
  }

  private renderRetrain(): void {
    const button = el("button", "retrain", this.retrain.waiting ? "retraining..." : "retrain models");
    button.disabled = this.retrain.waiting;
    button.addEventListener("click", async () => {
      await this.retrain.click();
      this.render();
    });
    this.container.appendChild(button);
  }

  private renderFaults(): void {
    const box = el("div", "fault-panel");
    box.appendChild(el("h3", undefined, "fault injection"));
    const select = el("select");
    for (const pod of this.podIds()) {
      const option = el("option", undefined, pod) as HTMLOptionElement;
      option.value = pod;
      select.appendChild(option);
    }
    const kind = el("select");
    for (const k of ["cpu_hog", "mem_leak"]) {
      const option = el("option", undefined, k) as HTMLOptionElement;
      option.value = k;
      kind.appendChild(option);
    }
    const inject = el("button", undefined, "inject");
    inject.addEventListener("click", async () => {
      await this.faults.inject({
        target_pod: (select as HTMLSelectElement).value,
        fault_kind: (kind as HTMLSelectElement).value,
        workers: 32,
      });
      this.render();
    });
    box.append(select, kind, inject);
    if (this.faults.lastError) {
      box.appendChild(el("p", "error", this.faults.lastError));
    }
    const list = el("ul", "active-faults");
    for (const fault of this.faults.active) {
      const item = el("li", undefined, `${fault.fault_kind} on ${fault.target_pod} `);
      const clear = el("button", undefined, "clear");
      clear.addEventListener("click", async () => {
        await this.faults.clear(fault.fault_id);
        this.render();
      });
      item.appendChild(clear);
      list.appendChild(item);
    }
    box.appendChild(list);
    this.container.appendChild(box);
  }

  private renderConfig(): void {
    const box = el("div", "config-editor");
    box.appendChild(el("h3", undefined, "pipeline config"));
    const area = el("textarea") as HTMLTextAreaElement;
    area.value = this.config.doc ? JSON.stringify(this.config.doc, null, 2) : "";
    const save = el("button", undefined, "apply config");
    const errors = el("div", "config-errors");
    for (const fe of this.config.fieldErrors) {
      errors.appendChild(el("p", "error", `${fe.field}: ${fe.message}`));
    }
    save.addEventListener("click", async () => {
      let parsed: Record<string, unknown>;
      try {
        parsed = JSON.parse(area.value) as Record<string, unknown>;
      } catch (exc) {
        this.config.fieldErrors = [{ field: "(document)", message: String(exc) }];
        this.render();
        return;
      }
      await this.config.save(parsed);
      this.render();
    });
    box.append(area, save, errors);
    this.container.appendChild(box);
  }
}
