"""Line-delimited JSON recording and replay of metric-update batches.

One batch per line: {"ts": <unix>, "updates": [{"id": ..., "metric": ...,
"value": ...}]}. Loading yields batches in timestamp order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

from ..errors import ParseError


@dataclass(frozen=True)
class MetricUpdate:
    id: str
    metric: str
    value: float


@dataclass(frozen=True)
class ReplayBatch:
    ts: float
    updates: tuple[MetricUpdate, ...]


def replay_record(path: str, batches: Iterable[ReplayBatch]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for batch in batches:
            doc = {
                "ts": batch.ts,
                "updates": [
                    {"id": u.id, "metric": u.metric, "value": u.value} for u in batch.updates
                ],
            }
            fh.write(json.dumps(doc) + "\n")


def replay_load(path: str) -> Iterator[ReplayBatch]:
    batches: list[ReplayBatch] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                updates = tuple(
                    MetricUpdate(id=str(u["id"]), metric=str(u["metric"]), value=float(u["value"]))
                    for u in doc["updates"]
                )
                batches.append(ReplayBatch(ts=float(doc["ts"]), updates=updates))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(str(exc), line=lineno) from None
    batches.sort(key=lambda b: b.ts)
    return iter(batches)
