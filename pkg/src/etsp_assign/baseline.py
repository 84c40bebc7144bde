"""Centralized optimal assignment used as a cost baseline and test oracle."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .core import distance

BRUTE_FORCE_LIMIT = 9


@dataclass(frozen=True)
class Assignment:
    pairs: frozenset[tuple[int, int]]  # 1-based (agent, target)
    total_cost: float

    def complete(self, n: int, m: int) -> bool:
        agents = {i for i, _ in self.pairs}
        targets = {j for _, j in self.pairs}
        return len(agents) == len(targets) == len(self.pairs) == min(n, m)


def cost_matrix(agents: Sequence[Sequence[float]], targets: Sequence[Sequence[float]]) -> list[list[float]]:
    return [[distance(p, q) for q in targets] for p in agents]


def _check(c: Sequence[Sequence[float]]) -> tuple[int, int]:
    n = len(c)
    m = len(c[0]) if n else 0
    for row in c:
        if len(row) != m:
            raise ValueError("cost matrix rows have different lengths")
        for x in row:
            if not (math.isfinite(x) and x >= 0):
                raise ValueError(f"costs must be finite and non-negative, got {x}")
    return n, m


def _total(c, pairs) -> float:
    return math.fsum(c[i - 1][j - 1] for i, j in pairs)


def hungarian(c: Sequence[Sequence[float]]) -> Assignment:
    """Minimum-cost complete assignment in O(N^3), N = max(n, m).

    Rectangular input is padded with zero-cost dummy rows/columns; pairs
    touching a dummy are dropped from the result.
    """
    n, m = _check(c)
    if n == 0 or m == 0:
        return Assignment(frozenset(), 0.0)
    N = max(n, m)
    a = [[c[i][j] if i < n and j < m else 0.0 for j in range(N)] for i in range(N)]

    # shortest augmenting paths with row/column potentials (1-based, column 0 is a sentinel)
    u = [0.0] * (N + 1)
    w = [0.0] * (N + 1)
    match = [0] * (N + 1)  # match[col] = row
    way = [0] * (N + 1)
    for row in range(1, N + 1):
        match[0] = row
        col0 = 0
        minv = [math.inf] * (N + 1)
        used = [False] * (N + 1)
        while True:
            used[col0] = True
            i0 = match[col0]
            delta, col1 = math.inf, 0
            for col in range(1, N + 1):
                if used[col]:
                    continue
                cur = a[i0 - 1][col - 1] - u[i0] - w[col]
                if cur < minv[col]:
                    minv[col] = cur
                    way[col] = col0
                if minv[col] < delta:
                    delta, col1 = minv[col], col
            for col in range(N + 1):
                if used[col]:
                    u[match[col]] += delta
                    w[col] -= delta
                else:
                    minv[col] -= delta
            col0 = col1
            if match[col0] == 0:
                break
        while col0:
            col1 = way[col0]
            match[col0] = match[col1]
            col0 = col1

    pairs = frozenset(
        (match[col], col) for col in range(1, N + 1) if match[col] <= n and col <= m
    )
    return Assignment(pairs, _total(c, pairs))


def brute_force_assignment(c: Sequence[Sequence[float]]) -> Assignment:
    """Exhaustive minimum over all injections of the smaller side into the larger."""
    n, m = _check(c)
    if min(n, m) > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to min(n, m) <= {BRUTE_FORCE_LIMIT}")
    if n == 0 or m == 0:
        return Assignment(frozenset(), 0.0)
    best, best_pairs = math.inf, None
    if n <= m:
        for cols in itertools.permutations(range(m), n):
            total = sum(c[i][j] for i, j in enumerate(cols))
            if total < best:
                best, best_pairs = total, [(i + 1, j + 1) for i, j in enumerate(cols)]
    else:
        for rows in itertools.permutations(range(n), m):
            total = sum(c[i][j] for j, i in enumerate(rows))
            if total < best:
                best, best_pairs = total, [(i + 1, j + 1) for j, i in enumerate(rows)]
    pairs = frozenset(best_pairs)
    return Assignment(pairs, _total(c, pairs))
