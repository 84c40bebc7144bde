"""Per-agent ETSP Assignment: initialization, motion law and communication round.

Targets are referenced by 1-based index into the shared tour. All
functions here are pure: they return new states and never mutate inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

from .core import (
    Point,
    ScenarioError,
    SimulationIntegrityError,
    as_point,
    between_exclusive,
    distance,
    index_add,
)
from .tour import TargetTuple


@dataclass(frozen=True)
class AgentState:
    uid: int
    pos: Point
    curr: int
    next: int
    prev: int
    status: tuple[int, ...]  # 1 = possibly available, 0 = known assigned elsewhere
    speed: float
    exited: bool = False

    @property
    def m(self) -> int:
        return len(self.status)


class Message(NamedTuple):
    prev: int
    curr: int
    next: int
    uid: int
    dist: float


def initialize(uid: int, pos: Sequence[float], q: TargetTuple, v: float) -> AgentState:
    """Greedy start: head for the nearest target (ties -> smallest index)."""
    m = len(q)
    if m == 0:
        raise ScenarioError("cannot initialize an agent without targets")
    if not v > 0:
        raise ScenarioError(f"speed must be positive, got {v}")
    p = as_point(pos)
    curr = min(range(1, m + 1), key=lambda j: (distance(q.at(j), p), j))
    return AgentState(
        uid=uid,
        pos=p,
        curr=curr,
        next=index_add(curr, 1, m),
        prev=index_add(curr, -1, m),
        status=(1,) * m,
        speed=float(v),
    )


def motion_step(s: AgentState, q: TargetTuple, dt: float) -> Point:
    """Position after moving straight at full speed toward ``curr`` for ``dt``.

    Arrival is clamped so the returned point is the target itself.
    """
    if s.exited:
        return s.pos
    target = q.at(s.curr)
    remaining = distance(s.pos, target)
    step = s.speed * dt
    if step >= remaining:
        return target
    frac = step / remaining
    return tuple(p + (t - p) * frac for p, t in zip(s.pos, target))


def compose_message(s: AgentState, q: TargetTuple) -> Message:
    if s.exited:
        raise SimulationIntegrityError(f"agent {s.uid} has exited and cannot broadcast")
    return Message(s.prev, s.curr, s.next, s.uid, distance(s.pos, q.at(s.curr)))


def _loses(my_dist: float, my_uid: int, msg: Message, tiebreak_inverted: bool) -> bool:
    if my_dist != msg.dist:
        return my_dist > msg.dist
    if tiebreak_inverted:
        # fault injection: on a tie each side believes the other should yield
        return False
    return my_uid < msg.uid


def process_round(
    s: AgentState,
    q: TargetTuple,
    inbox: Sequence[Message],
    *,
    tiebreak_inverted: bool = False,
) -> AgentState:
    """Apply one communication round to ``s`` given the messages it received.

    ``inbox`` must be sorted by sender uid with no duplicates and no
    message from ``s`` itself. ``s.pos`` is the position at the round
    instant, which is what the agent's own distance is measured from.
    """
    if s.exited:
        return s
    last = None
    for msg in inbox:
        if msg.uid == s.uid:
            raise SimulationIntegrityError(f"agent {s.uid} received its own message")
        if last is not None and msg.uid <= last:
            raise SimulationIntegrityError(
                f"inbox of agent {s.uid} not strictly ascending by uid at {msg.uid}"
            )
        last = msg.uid

    m = s.m
    status = list(s.status)
    curr = s.curr
    my_dist = distance(s.pos, q.at(curr))

    for msg in inbox:
        for j in between_exclusive(msg.prev, msg.next, m):
            if j != curr:
                status[j - 1] = 0
        if msg.prev == msg.next == msg.curr != curr:
            status[msg.curr - 1] = 0
        if msg.curr == curr:
            if _loses(my_dist, s.uid, msg, tiebreak_inverted):
                status[curr - 1] = 0
            else:
                if s.next != curr:
                    status[s.next - 1] = 0
                if msg.next != curr:
                    status[msg.next - 1] = 0

    return settle(s, status)


def settle(s: AgentState, status: Sequence[int]) -> AgentState:
    """Exit if nothing is available, otherwise walk curr/next/prev onto available targets."""
    new_status = tuple(status)
    if new_status == s.status:
        new_status = s.status  # share unchanged tuples between rounds
    if not any(new_status):
        return replace(s, status=new_status, exited=True)
    m = s.m
    curr = s.curr
    while new_status[curr - 1] == 0:
        curr = index_add(curr, 1, m)
    nxt = index_add(curr, 1, m)
    while new_status[nxt - 1] == 0:
        nxt = index_add(nxt, 1, m)
    prev = s.prev
    while new_status[prev - 1] == 0:
        prev = index_add(prev, -1, m)
    return replace(s, curr=curr, next=nxt, prev=prev, status=new_status)
