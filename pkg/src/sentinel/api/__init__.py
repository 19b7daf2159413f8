from .events import ApiEvent, EventBus
from .runtime import EngineRuntime
from .server import build_app

__all__ = ["ApiEvent", "EventBus", "EngineRuntime", "build_app"]
