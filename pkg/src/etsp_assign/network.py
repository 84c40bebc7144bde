"""r-disk connectivity and the synchronous broadcast exchange."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import Point, distance
from .protocol import AgentState, Message, compose_message
from .tour import TargetTuple


@dataclass(frozen=True)
class DiskGraph:
    r: float
    adjacency: dict[int, frozenset[int]]

    def neighbors(self, uid: int) -> frozenset[int]:
        return self.adjacency.get(uid, frozenset())

    def edges(self) -> list[tuple[int, int]]:
        return sorted((a, b) for a, nbrs in self.adjacency.items() for b in nbrs if a < b)

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> "DiskGraph":
        """A supergraph of this one with ``extra`` undirected edges added."""
        adj = {u: set(n) for u, n in self.adjacency.items()}
        for a, b in extra:
            if a == b:
                continue
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        return DiskGraph(self.r, {u: frozenset(n) for u, n in adj.items()})


def disk_graph(positions: Sequence[tuple[int, Point]], r: float) -> DiskGraph:
    """Edge between distinct agents iff their distance is at most ``r``.

    Agents are bucketed into cubes of side ``r`` so only neighbouring
    buckets are compared; the threshold test itself is exact.
    """
    if not r > 0:
        raise ValueError(f"communication range must be positive, got {r}")
    adj: dict[int, set[int]] = {uid: set() for uid, _ in positions}
    if len(positions) < 2:
        return DiskGraph(r, {u: frozenset(n) for u, n in adj.items()})
    d = len(positions[0][1])
    size = r * (1 + 1e-9)  # slack so rounding in c / size never splits a pair 2 buckets apart
    buckets: dict[tuple[int, ...], list[tuple[int, Point]]] = {}
    for uid, p in positions:
        buckets.setdefault(tuple(math.floor(c / size) for c in p), []).append((uid, p))
    offsets = list(itertools.product((-1, 0, 1), repeat=d))
    for key, members in buckets.items():
        for off in offsets:
            other = tuple(a + b for a, b in zip(key, off))
            if other < key:
                continue
            cand = buckets.get(other)
            if not cand:
                continue
            for ia, (ua, pa) in enumerate(members):
                start = ia + 1 if other == key else 0
                for ub, pb in cand[start:]:
                    if distance(pa, pb) <= r:
                        adj[ua].add(ub)
                        adj[ub].add(ua)
    return DiskGraph(r, {u: frozenset(n) for u, n in adj.items()})


def broadcast_round(
    states: Sequence[AgentState],
    q: TargetTuple,
    r: float,
    extra_edges: Iterable[tuple[int, int]] = (),
) -> tuple[dict[int, list[Message]], int]:
    """Deliver every active agent's message to its neighbours.

    Returns per-uid inboxes (ascending sender uid) and the number of
    messages delivered. Exited agents neither send nor receive.
    """
    graph = disk_graph([(s.uid, s.pos) for s in states], r)
    extra = list(extra_edges)
    if extra:
        graph = graph.with_edges(extra)
    active = {s.uid: s for s in states if not s.exited}
    outgoing = {uid: compose_message(s, q) for uid, s in active.items()}
    inboxes: dict[int, list[Message]] = {}
    delivered = 0
    for s in states:
        if s.exited:
            inboxes[s.uid] = []
            continue
        box = [outgoing[k] for k in sorted(graph.neighbors(s.uid)) if k in outgoing]
        inboxes[s.uid] = box
        delivered += len(box)
    return inboxes, delivered
