"""Clock abstraction for per-iteration time budgets.

The wall clock reads monotonic real time and ignores charges. The virtual
clock starts at zero each iteration and advances only by explicitly charged
engine costs, which makes budgeted runs exactly replayable.
"""

from __future__ import annotations

import time

__all__ = ["VirtualClock", "WallClock", "make_clock"]


class VirtualClock:
    kind = "virtual"

    def __init__(self):
        self._now = 0.0

    def now(self) -> float:
        return self._now

    def charge(self, cost: float) -> None:
        self._now += cost

    def start_iteration(self) -> float:
        self._now = 0.0
        return 0.0


class WallClock:
    kind = "wall"

    def now(self) -> float:
        return time.monotonic()

    def charge(self, cost: float) -> None:
        pass

    def start_iteration(self) -> float:
        return self.now()


def make_clock(kind: str):
    if kind == "virtual":
        return VirtualClock()
    if kind == "wall":
        return WallClock()
    raise ValueError(f"unknown clock kind '{kind}'")
