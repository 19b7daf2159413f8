"""Interval scheduler over a pluggable clock.

Tasks fire at fixed intervals starting one interval after run() begins.
A task never overlaps itself: the loop is single-threaded and a slow
tick pushes the next occurrence to "immediately after", without
backfilling the occurrences it missed. Task errors go to the error
handler and the loop continues.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional


class WallClock:
    def now(self) -> float:
        return time.time()

    def sleep_until(self, t: float, interrupt: Optional[threading.Event] = None) -> None:
        delay = t - self.now()
        if delay <= 0:
            return
        if interrupt is None:
            time.sleep(delay)
        else:
            interrupt.wait(delay)


class SimulatedClock:
    def __init__(self, start: float = 0.0):
        self._t = float(start)

    def now(self) -> float:
        return self._t

    def sleep_until(self, t: float, interrupt: Optional[threading.Event] = None) -> None:
        if t > self._t:
            self._t = t

    def advance(self, dt: float) -> None:
        self._t += dt


@dataclass
class _Task:
    name: str
    interval: float
    fn: Callable[[float], None]
    next_due: float = 0.0
    runs: int = 0


class Scheduler:
    def __init__(
        self,
        clock,
        on_error: Optional[Callable[[str, Exception], None]] = None,
    ):
        self.clock = clock
        self.on_error = on_error
        self._tasks: list[_Task] = []
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    def add_task(self, name: str, interval: float, fn: Callable[[float], None]) -> None:
        if interval <= 0:
            raise ValueError("interval must be > 0")
        self._tasks.append(_Task(name=name, interval=interval, fn=fn))

    def runs(self, name: str) -> int:
        for task in self._tasks:
            if task.name == name:
                return task.runs
        raise KeyError(name)

    def run(self, until: Optional[float] = None) -> None:
        start = self.clock.now()
        for task in self._tasks:
            task.next_due = start + task.interval
        while not self._stop.is_set() and self._tasks:
            due_at = min(task.next_due for task in self._tasks)
            if until is not None and due_at > until:
                break
            self.clock.sleep_until(due_at, interrupt=self._stop)
            if self._stop.is_set():
                break
            now = self.clock.now()
            for task in self._tasks:
                if task.next_due <= now:
                    try:
                        task.fn(task.next_due)
                    except Exception as exc:  # noqa: BLE001 - surfaced, loop continues
                        if self.on_error is not None:
                            self.on_error(task.name, exc)
                    task.runs += 1
                    task.next_due += task.interval
                    finished = self.clock.now()
                    if task.next_due <= finished:
                        # slow tick: fire again right away, no backfill burst
                        task.next_due = finished

    def start_background(self, until: Optional[float] = None) -> threading.Thread:
        self._thread = threading.Thread(target=self.run, kwargs={"until": until}, daemon=True)
        self._thread.start()
        return self._thread

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
