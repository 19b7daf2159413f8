"""Exception hierarchy shared across the engine."""

from __future__ import annotations


class SentinelError(Exception):
    """Base class for all engine errors."""


# --- graph store ---

class UnknownKind(SentinelError):
    pass


class UnknownMetric(SentinelError):
    def __init__(self, kind: str, metric: str):
        super().__init__(f"metric {metric!r} is not declared for kind {kind!r}")
        self.kind = kind
        self.metric = metric


class NotFound(SentinelError):
    pass


class DanglingEndpoint(SentinelError):
    pass


class OutOfRange(SentinelError):
    pass


class InconsistentSnapshot(SentinelError):
    pass


# --- ingestion ---

class HttpError(SentinelError):
    pass


class MalformedResponse(SentinelError):
    pass


class PartialResult(SentinelError):
    """Some metric queries failed; successful entries are still carried.

    ``values`` maps (node id, metric name) -> float for the specs that
    succeeded; ``errors`` maps metric name -> the exception it raised.
    """

    def __init__(self, values, errors):
        super().__init__(f"{len(errors)} of {len(errors) + len(values)} metric queries failed")
        self.values = values
        self.errors = errors


class UnknownTarget(SentinelError):
    pass


class DuplicateFault(SentinelError):
    pass


class ParseError(SentinelError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# --- models ---

class DimensionMismatch(SentinelError):
    pass


class SingleClass(SentinelError):
    pass


class NonConvergence(SentinelError):
    pass


class DegenerateGrouping(SentinelError):
    pass


class EmptyTrials(SentinelError):
    pass


# --- pipeline ---

class CyclicPolicy(SentinelError):
    def __init__(self, cycle):
        super().__init__("cyclic kind policy: " + " -> ".join(str(k) for k in cycle))
        self.cycle = cycle


class NoNodes(SentinelError):
    pass


class MissingBundle(SentinelError):
    def __init__(self, kind):
        super().__init__(f"no published model bundle for kind {kind}")
        self.kind = kind


class InsufficientData(SentinelError):
    def __init__(self, kind, have: int, need: int):
        super().__init__(f"kind {kind}: {have} observations, need {need}")
        self.kind = kind
        self.have = have
        self.need = need


class TooFewRows(SentinelError):
    pass


class ConfigError(SentinelError):
    """Invalid configuration; carries (field, message) pairs."""

    def __init__(self, field_errors):
        super().__init__("; ".join(f"{f}: {m}" for f, m in field_errors))
        self.field_errors = list(field_errors)
