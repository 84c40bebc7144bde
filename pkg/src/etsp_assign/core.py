"""Geometry, the cube environment and 1-based cyclic index arithmetic.

Tour indices are plain ``int`` values in ``1..m``; every helper that
walks the ring takes the modulus ``m`` explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

Point = Tuple[float, ...]


class ScenarioError(ValueError):
    """Raised for invalid scenario input (bad geometry, duplicates, ...)."""


class SimulationIntegrityError(RuntimeError):
    """Raised when the simulation harness detects malformed internal data."""


@dataclass(frozen=True)
class Environment:
    """The cube ``[0, side]^d``."""

    d: int
    side: float

    def __post_init__(self):
        if self.d < 1:
            raise ScenarioError(f"dimension must be >= 1, got {self.d}")
        if not (math.isfinite(self.side) and self.side > 0):
            raise ScenarioError(f"side length must be finite and > 0, got {self.side}")

    def contains(self, p: Sequence[float]) -> bool:
        return len(p) == self.d and all(0.0 <= c <= self.side for c in p)

    @property
    def diameter(self) -> float:
        return self.side * math.sqrt(self.d)


def as_point(coords: Sequence[float]) -> Point:
    return tuple(float(c) for c in coords)


def index_add(i: int, k: int, m: int) -> int:
    """Add ``k`` to the 1-based index ``i`` modulo ``m`` (so m+1 -> 1, 0 -> m)."""
    return (i - 1 + k) % m + 1


def between_exclusive(a: int, b: int, m: int) -> list[int]:
    """Indices strictly after ``a`` and strictly before ``b`` walking forward.

    When ``a == b`` the walk goes all the way round, giving the other m-1
    indices.
    """
    count = (b - a - 1) % m
    return [(a + s - 1) % m + 1 for s in range(1, count + 1)]


def distance(p: Sequence[float], q: Sequence[float]) -> float:
    if len(p) != len(q):
        raise ScenarioError(f"dimension mismatch: {len(p)} vs {len(q)}")
    return math.dist(p, q)
