"""Shared circular target ordering: canonical sort, double-tree tour, exact oracle."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import Point, ScenarioError, as_point, distance

EXACT_TOUR_LIMIT = 12


@dataclass(frozen=True)
class TargetTuple:
    """Ordered targets. Index ``j`` in ``1..m`` refers to ``points[j - 1]``.

    ``canonical`` is set when the order is a pure function of the point
    set, i.e. it came out of :func:`canonical_order` (possibly followed by
    :func:`double_tree_tour`).
    """

    points: tuple[Point, ...]
    canonical: bool = False

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def at(self, j: int) -> Point:
        return self.points[j - 1]


@dataclass(frozen=True)
class TourStats:
    length: float
    approx_factor_bound: float


def canonical_order(points: Iterable[Sequence[float]]) -> TargetTuple:
    """Sort points lexicographically; rejects duplicates and mixed dimensions."""
    pts = [as_point(p) for p in points]
    if pts and len({len(p) for p in pts}) != 1:
        raise ScenarioError("targets have mixed dimensions")
    ordered = sorted(pts)
    for a, b in zip(ordered, ordered[1:]):
        if a == b:
            raise ScenarioError(f"duplicate target {a}")
    return TargetTuple(tuple(ordered), canonical=True)


def _mst_children(pts: Sequence[Point]) -> list[list[int]]:
    """Kruskal over all pairs; equal weights ordered by (min index, max index)."""
    m = len(pts)
    edges = sorted(
        (distance(pts[i], pts[j]), i, j) for i in range(m) for j in range(i + 1, m)
    )
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    adj: list[list[int]] = [[] for _ in range(m)]
    taken = 0
    for _, i, j in edges:
        ri, rj = find(i), find(j)
        if ri == rj:
            continue
        parent[ri] = rj
        adj[i].append(j)
        adj[j].append(i)
        taken += 1
        if taken == m - 1:
            break

    # orient the tree away from index 0
    children: list[list[int]] = [[] for _ in range(m)]
    seen = [False] * m
    seen[0] = True
    stack = [0]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                children[u].append(w)
                stack.append(w)
    for c in children:
        c.sort()
    return children


def double_tree_permutation(q: TargetTuple) -> list[int]:
    """0-based permutation of ``q`` visited by the normalized double-tree walk."""
    m = len(q)
    if m == 0:
        raise ScenarioError("empty target tuple")
    if m <= 2:
        return list(range(m))
    children = _mst_children(q.points)
    order: list[int] = []
    stack = [0]
    while stack:
        u = stack.pop()
        order.append(u)
        stack.extend(reversed(children[u]))
    # preorder from index 0 already starts at 0; fix the direction
    if order[1] > order[-1]:
        order = [order[0]] + order[:0:-1]
    return order


def double_tree_tour(q: TargetTuple) -> TargetTuple:
    """Reorder ``q`` along the preorder walk of its Euclidean MST.

    The walk starts at ``q``'s first point and visits children in
    ascending index, so the result depends only on ``q``'s order; feed it
    a canonical tuple to get an order every agent agrees on. Tour length
    is at most twice the optimum.
    """
    perm = double_tree_permutation(q)
    return TargetTuple(tuple(q.points[i] for i in perm), canonical=q.canonical)


def shared_tour(points: Iterable[Sequence[float]], *, canonicalize: bool = True) -> TargetTuple:
    """The tour every agent computes from the raw target set.

    ``canonicalize=False`` skips the lexicographic sort; it exists only to
    demonstrate that the resulting order then depends on input order.
    """
    if canonicalize:
        q = canonical_order(points)
    else:
        q = TargetTuple(tuple(as_point(p) for p in points), canonical=False)
    return double_tree_tour(q)


def tour_length(q: Sequence[Sequence[float]] | TargetTuple) -> float:
    pts = list(q)
    if not pts:
        raise ScenarioError("empty target tuple")
    if len(pts) == 1:
        return 0.0
    return sum(distance(pts[i - 1], pts[i]) for i in range(1, len(pts))) + distance(
        pts[-1], pts[0]
    )


def exact_tour(q: Sequence[Sequence[float]] | TargetTuple) -> TourStats:
    """Shortest closed tour by enumerating the (m-1)!/2 distinct cycles."""
    pts = list(q)
    m = len(pts)
    if m == 0:
        raise ScenarioError("empty target tuple")
    if m > EXACT_TOUR_LIMIT:
        raise ValueError(f"exact_tour is limited to {EXACT_TOUR_LIMIT} points, got {m}")
    if m <= 3:
        return TourStats(tour_length(pts), 1.0)
    dist = [[distance(a, b) for b in pts] for a in pts]
    best = math.inf
    for perm in itertools.permutations(range(1, m)):
        if perm[0] > perm[-1]:
            continue  # mirror image of a cycle already counted
        total = dist[0][perm[0]] + dist[perm[-1]][0]
        for a, b in zip(perm, perm[1:]):
            total += dist[a][b]
        if total < best:
            best = total
    return TourStats(best, 1.0)
