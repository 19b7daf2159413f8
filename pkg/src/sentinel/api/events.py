"""In-process event bus backing the server-sent event stream.

Events get a strictly increasing sequence number; a bounded replay
buffer lets clients resume with Last-Event-ID and miss nothing that
is still buffered.
"""

from __future__ import annotations

import json
import queue
import threading
import time
from collections import deque
from dataclasses import dataclass
from typing import Optional

EVENT_KINDS = (
    "score_update",
    "model_retrained",
    "fault_injected",
    "fault_cleared",
    "tick_error",
    "config_updated",
)


@dataclass(frozen=True)
class ApiEvent:
    sequence: int
    event_kind: str
    payload: dict
    ts: float

    def sse_frame(self) -> str:
        data = json.dumps({"sequence": self.sequence, "ts": self.ts, **self.payload})
        return f"id: {self.sequence}\nevent: {self.event_kind}\ndata: {data}\n\n"


class EventBus:
    def __init__(self, buffer_size: int = 4096):
        self._lock = threading.Lock()
        self._sequence = 0
        self._buffer: deque[ApiEvent] = deque(maxlen=buffer_size)
        self._subscribers: list[queue.Queue] = []

    def publish(self, event_kind: str, payload: dict) -> ApiEvent:
        if event_kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {event_kind!r}")
        with self._lock:
            self._sequence += 1
            event = ApiEvent(self._sequence, event_kind, payload, time.time())
            self._buffer.append(event)
            subscribers = list(self._subscribers)
        for q in subscribers:
            q.put(event)
        return event

    def subscribe(self, last_event_id: Optional[int] = None) -> tuple[list[ApiEvent], queue.Queue]:
        """Returns (missed buffered events after last_event_id, live queue)."""
        q: queue.Queue = queue.Queue()
        with self._lock:
            missed = [
                e for e in self._buffer if last_event_id is None or e.sequence > last_event_id
            ] if last_event_id is not None else []
            self._subscribers.append(q)
        return missed, q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    @property
    def last_sequence(self) -> int:
        with self._lock:
            return self._sequence
