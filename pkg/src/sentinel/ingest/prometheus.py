"""Read-only client for a Prometheus-compatible instant-query API.

One instant query per metric spec; vector results are keyed by the
first recognized target label. Missing series simply yield no entry --
the client never invents values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import httpx

from ..errors import HttpError, MalformedResponse, PartialResult
from ..graph.store import ComponentKind

TARGET_LABELS = ("id", "pod", "node", "instance", "name")


@dataclass(frozen=True)
class MetricQuerySpec:
    kind: ComponentKind
    metric_name: str
    promql: str
    unit: str = ""

    def __post_init__(self):
        if not self.promql:
            raise ValueError("promql must be non-empty")

    def query(self) -> str:
        # the {id} placeholder supports per-target templates; a bulk
        # scrape widens it to match every target
        return self.promql.replace("{id}", ".+")


def scrape_prometheus(
    base_url: str,
    specs: list[MetricQuerySpec],
    at: float,
    client: Optional[httpx.Client] = None,
) -> dict[tuple[str, str], float]:
    """Returns {(node id, metric name): value}. Raises PartialResult when
    some specs fail (successful entries attached), or the underlying
    error when every spec fails."""
    own_client = client is None
    client = client or httpx.Client(timeout=10.0)
    values: dict[tuple[str, str], float] = {}
    errors: dict[str, Exception] = {}
    try:
        for spec in specs:
            try:
                for target, value in _query_vector(client, base_url, spec.query(), at):
                    values[(target, spec.metric_name)] = value
            except (HttpError, MalformedResponse) as exc:
                errors[spec.metric_name] = exc
    finally:
        if own_client:
            client.close()
    if errors:
        if not values and len(errors) == len(specs):
            raise next(iter(errors.values()))
        raise PartialResult(values, errors)
    return values


def _query_vector(client: httpx.Client, base_url: str, query: str, at: float):
    url = base_url.rstrip("/") + "/api/v1/query"
    try:
        response = client.get(url, params={"query": query, "time": at})
    except httpx.HTTPError as exc:
        raise HttpError(f"transport failure querying {url}: {exc}") from exc
    if response.status_code != 200:
        raise HttpError(f"HTTP {response.status_code} from {url}")
    try:
        doc = response.json()
    except ValueError as exc:
        raise MalformedResponse(f"response is not JSON: {exc}") from None
    if doc.get("status") != "success":
        raise MalformedResponse(f"status={doc.get('status')!r}")
    data = doc.get("data")
    if not isinstance(data, dict) or data.get("resultType") != "vector":
        raise MalformedResponse("expected a vector result")
    out = []
    for entry in data.get("result", []):
        try:
            labels = entry["metric"]
            value = float(entry["value"][1])
        except (KeyError, IndexError, TypeError, ValueError):
            raise MalformedResponse(f"malformed vector entry: {entry!r}") from None
        target = next((labels[l] for l in TARGET_LABELS if l in labels), None)
        if target is not None:
            out.append((target, value))
    return out
