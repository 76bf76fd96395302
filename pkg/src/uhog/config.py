"""Engine-wide knobs shared by the library, scripts and CLI."""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class EngineConfig:
    budget: int = 10_000      # reduction steps per normalize / simplify call
    width: int = 64           # generator-set cap per chart item
    express_depth: int = 8    # named-component depth for expression search
    express_pool: int = 4000  # candidate strings kept per component and depth
    express_work: int = 12_000  # meaning combinations across the whole search


_current = EngineConfig()


def current() -> EngineConfig:
    return _current


def configure(**changes) -> EngineConfig:
    """Replace fields of the active configuration; returns the previous one."""
    global _current
    prev = _current
    _current = replace(_current, **changes)
    return prev


def restore(cfg: EngineConfig) -> None:
    global _current
    _current = cfg
