"""HTTP facade over the engine runtime.

All bodies are JSON; errors share the shape {"error": code, "detail":
text} (config validation adds a "fields" array). /api/events is a
server-sent event stream resumable via the Last-Event-ID header.
"""

from __future__ import annotations

import json
import queue
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from ..config import config_to_dict
from ..errors import (
    ConfigError,
    DuplicateFault,
    NotFound,
    SentinelError,
    UnknownKind,
    UnknownTarget,
)
from ..graph.store import ComponentKind, EdgeType
from ..ingest.simulator import FaultSpec
from .runtime import EngineRuntime


def _error(status: int, code: str, detail: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "detail": detail, **extra})


def _node_doc(node) -> dict:
    return {
        "id": node.id,
        "kind": node.kind.value,
        "name": node.name,
        "metrics": node.metrics,
        "anomaly_score": node.anomaly_score,
        "score_source": node.score_source.value,
        "last_updated": node.last_updated,
    }


def build_app(runtime: EngineRuntime, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="cluster-sentinel", docs_url=None, redoc_url=None)

    @app.get("/api/status")
    def status():
        return {
            "mode": runtime.mode,
            "node_count": runtime.graph.node_count(),
            "edge_count": runtime.graph.edge_count(),
            "last_event": runtime.events.last_sequence,
            "update_graph_interval_s": runtime.config.update_graph_interval_s,
            "update_models_interval_s": runtime.config.update_models_interval_s,
        }

    @app.get("/api/graph")
    def graph():
        return Response(content=runtime.graph.snapshot().to_json(), media_type="application/json")

    @app.get("/api/components/{kind}")
    def components(kind: str):
        try:
            parsed = ComponentKind.parse(kind)
        except UnknownKind as exc:
            return _error(400, "unknown_kind", str(exc))
        return {"kind": parsed.value, "nodes": [_node_doc(n) for n in runtime.graph.nodes_of_kind(parsed)]}

    @app.get("/api/component/{node_id:path}/neighbors")
    def neighbors(node_id: str, edge: str, direction: str = "both"):
        try:
            edge_type = EdgeType.parse(edge)
        except SentinelError as exc:
            return _error(400, "unknown_edge_type", str(exc))
        if direction not in ("in", "out", "both"):
            return _error(400, "bad_direction", f"direction must be in|out|both, got {direction!r}")
        try:
            found = runtime.graph.neighbors(node_id, edge_type, direction)
        except NotFound as exc:
            return _error(404, "not_found", str(exc))
        return {"id": node_id, "edge": edge_type.value, "direction": direction,
                "neighbors": [_node_doc(n) for n in found]}

    @app.get("/api/component/{node_id:path}/trace")
    def trace(node_id: str):
        try:
            return runtime.trace(node_id)
        except NotFound as exc:
            return _error(404, "not_found", str(exc))

    @app.get("/api/component/{node_id:path}")
    def component(node_id: str):
        try:
            return _node_doc(runtime.graph.get_node(node_id))
        except NotFound as exc:
            return _error(404, "not_found", str(exc))

    @app.post("/api/pipeline/update-graph")
    def trigger_update_graph():
        if not runtime.pipeline.graph_tick_lock.acquire(blocking=False):
            return _error(409, "tick_running", "an update-graph tick is already running")
        runtime.pipeline.graph_tick_lock.release()
        report = runtime.graph_tick()
        return {
            "at": report.at,
            "duration_s": report.duration_s,
            "kinds": [
                {
                    "kind": e.kind.value,
                    "mode": e.mode,
                    "scored": len(e.scores),
                    "unscored": len(e.unscored),
                    "issues": e.issues,
                }
                for e in report.kinds
            ],
        }

    @app.post("/api/pipeline/update-models")
    def trigger_update_models():
        if not runtime.pipeline.model_tick_lock.acquire(blocking=False):
            return _error(409, "tick_running", "an update-models tick is already running")
        runtime.pipeline.model_tick_lock.release()
        report = runtime.model_tick()
        return {
            "at": report.at,
            "results": {
                kind.value: {
                    "status": r.status,
                    "version": r.bundle.version if r.bundle else None,
                    "error": str(r.error) if r.error else None,
                }
                for kind, r in report.results.items()
            },
        }

    @app.get("/api/config")
    def get_config():
        return config_to_dict(runtime.config)

    @app.put("/api/config")
    async def put_config(request: Request):
        try:
            doc = await request.json()
        except json.JSONDecodeError as exc:
            return _error(422, "invalid_config", f"body is not JSON: {exc}", fields=[])
        try:
            runtime.replace_config(doc)
        except ConfigError as exc:
            return _error(
                422,
                "invalid_config",
                str(exc),
                fields=[{"field": f, "message": m} for f, m in exc.field_errors],
            )
        return config_to_dict(runtime.config)

    @app.get("/api/simulator/faults")
    def list_faults():
        if runtime.mode != "simulate":
            return _error(405, "wrong_mode", "simulator endpoints require simulate mode")
        return {
            "faults": [
                {
                    "fault_id": f.fault_id,
                    "target_pod": f.target_pod,
                    "fault_kind": f.fault_kind,
                    "workers": f.workers,
                    "started_at": f.started_at,
                    "duration": f.duration,
                }
                for f in runtime.simulator.active_faults()
            ]
        }

    @app.post("/api/simulator/fault")
    async def inject_fault(request: Request):
        if runtime.mode != "simulate":
            return _error(405, "wrong_mode", "fault injection requires simulate mode")
        doc = await request.json()
        try:
            spec = FaultSpec(
                fault_id=doc.get("fault_id", ""),
                target_pod=doc["target_pod"],
                fault_kind=doc["fault_kind"],
                workers=int(doc.get("workers", 32)),
                started_at=float(doc.get("started_at", 0.0)),
                duration=doc.get("duration"),
            )
        except (KeyError, ValueError) as exc:
            return _error(422, "invalid_fault", str(exc))
        try:
            fault_id = runtime.inject_fault(spec)
        except UnknownTarget as exc:
            return _error(404, "unknown_target", str(exc))
        except DuplicateFault as exc:
            return _error(409, "duplicate_fault", str(exc))
        return JSONResponse(status_code=201, content={"fault_id": fault_id})

    @app.delete("/api/simulator/fault/{fault_id}")
    def clear_fault(fault_id: str):
        if runtime.mode != "simulate":
            return _error(405, "wrong_mode", "fault injection requires simulate mode")
        try:
            runtime.clear_fault(fault_id)
        except UnknownTarget as exc:
            return _error(404, "not_found", str(exc))
        return Response(status_code=204)

    @app.get("/api/models")
    def models():
        out = {}
        for kind, bundle in sorted(runtime.pipeline.registry.all().items()):
            out[kind.value] = {
                "version": bundle.version,
                "trained_at": bundle.trained_at,
                "unsupervised": bundle.unsupervised,
                "supervised": bundle.supervised,
                "training_rows": bundle.training_rows,
                "fingerprint": bundle.fingerprint,
                "flags": list(bundle.flags),
            }
        return out

    @app.get("/api/events")
    def events(request: Request, limit: Optional[int] = None):
        last_id = request.headers.get("Last-Event-ID")
        last_sequence = int(last_id) if last_id and last_id.isdigit() else None

        def stream():
            missed, live = runtime.events.subscribe(last_sequence)
            sent = 0
            try:
                for event in missed:
                    yield event.sse_frame()
                    sent += 1
                    if limit is not None and sent >= limit:
                        return
                while limit is None or sent < limit:
                    try:
                        event = live.get(timeout=1.0)
                    except queue.Empty:
                        yield ": keep-alive\n\n"
                        continue
                    yield event.sse_frame()
                    sent += 1
            finally:
                runtime.events.unsubscribe(live)

        return StreamingResponse(stream(), media_type="text/event-stream")

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
