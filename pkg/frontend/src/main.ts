import { ApiClient } from "./api.js";
import { ConfigEditor, FaultPanel, RetrainButton } from "./controls.js";
import { EventStream } from "./sse.js";
import { ConsoleStore } from "./state.js";
import { ControlsView, DetailPanel, GraphView } from "./view.js";

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const store = new ConsoleStore();
  const status = await api.status();
  store.applySnapshot(await api.graph());

  const graphView = new GraphView(document.getElementById("graph")!, store);
  const detail = new DetailPanel(document.getElementById("detail")!, store, api);
  const faults = new FaultPanel(api);
  faults.setMode(status.mode);
  await faults.refresh();
  const retrain = new RetrainButton(api);
  const config = new ConfigEditor(api);
  await config.load();
  const controls = new ControlsView(
    document.getElementById("controls")!,
    faults,
    retrain,
    config,
    () => [...store.nodes.values()].filter((n) => n.kind === "Pod").map((n) => n.id),
  );

  let selected: string | null = null;
  graphView.onSelect = (id) => {
    selected = id;
    graphView.render(selected);
    void detail.show(id);
  };

  const staleBanner = document.getElementById("stale")!;
  const staleAfterMs = status.update_graph_interval_s * 3 * 1000;

  const stream = new EventStream("", {
    onEvent: (event) => {
      store.applyEvent(event);
      retrain.onEvent(event);
      if (event.event === "fault_injected" || event.event === "fault_cleared") {
        void faults.refresh().then(() => controls.render());
      }
      if (event.event === "model_retrained") {
        controls.render();
      }
      graphView.render(selected);
      if (selected) void detail.show(selected);
    },
    onStatusChange: () => undefined,
  });
  stream.start();

  setInterval(() => {
    staleBanner.hidden = !stream.isStale(staleAfterMs);
  }, 1000);

  graphView.relayout();
  graphView.render(selected);
  controls.render();
}

void boot();
