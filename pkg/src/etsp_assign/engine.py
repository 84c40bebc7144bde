"""Hybrid simulation loop: straight-line motion between synchronous rounds."""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .audit import Auditor, Violation
from .core import SimulationIntegrityError, distance
from .network import broadcast_round, disk_graph
from .protocol import AgentState, initialize, motion_step, process_round, settle
from .scenarios import Scenario
from .tour import TargetTuple, shared_tour, tour_length

log = logging.getLogger(__name__)

TRACE_FORMAT = "etsp-assign.trace/1"

# independent PCG64 streams derived from the scenario seed
_STREAM_EXTRA_EDGES = 1
_STREAM_JITTER = 2
_STREAM_STRICT_TOUR = 3


@dataclass(frozen=True)
class Schedule:
    """Round spacing ``delta`` and the guaranteed maximum gap ``t_max``."""

    delta: float
    t_max: float
    jitter: bool = False

    def __post_init__(self):
        if not (0 < self.delta <= self.t_max):
            raise ValueError(f"need 0 < delta <= t_max, got {self.delta}, {self.t_max}")

    @classmethod
    def for_scenario(cls, sc: Scenario) -> "Schedule":
        gap = sc.config.round_gap
        return cls(gap, gap, sc.config.jitter)


@dataclass(frozen=True)
class Faults:
    """Deliberate defects used to show that the audit catches them."""

    tiebreak_inverted: bool = False
    flip_status_round: int | None = None  # flip one 0 back to 1 at this round
    bogus_loss_round: int | None = None  # force a parked agent off its target at/after this round


@dataclass(frozen=True)
class RoundSnapshot:
    k: int
    time: float
    states: tuple[AgentState, ...]
    inbox_sizes: tuple[int, ...]


@dataclass
class SimTrace:
    scenario: Scenario
    tour: TargetTuple
    tour_length: float
    t_max: float
    initial: tuple[AgentState, ...]
    rounds: list[RoundSnapshot] = field(default_factory=list)
    final: tuple[AgentState, ...] = ()
    complete: bool = False
    completion_time: float | None = None
    rounds_run: int = 0
    path_lengths: dict[int, float] = field(default_factory=dict)
    message_total: int = 0
    violations: list[Violation] = field(default_factory=list)
    failure: str | None = None
    contacts: dict[int, set[int]] = field(default_factory=dict)

    @property
    def initial_distances(self) -> dict[int, float]:
        return {s.uid: distance(s.pos, self.tour.at(s.curr)) for s in self.initial}

    @property
    def completion_bound(self) -> float:
        """(max initial distance + tour length) / v + n * t_max."""
        v = self.scenario.config.v
        return (
            max(self.initial_distances.values()) + self.tour_length
        ) / v + self.scenario.n * self.t_max

    def assignment(self) -> dict[int, int]:
        """uid -> final tour index, for agents that did not exit."""
        return {s.uid: s.curr for s in self.final if not s.exited}

    def summary(self) -> dict:
        paths = self.path_lengths
        return {
            "type": "summary",
            "complete": self.complete,
            "completion_time": self.completion_time,
            "rounds": self.rounds_run,
            "message_total": self.message_total,
            "path_lengths": {str(k): v for k, v in sorted(paths.items())},
            "max_path_length": max(paths.values()) if paths else 0.0,
            "total_path_length": math.fsum(paths.values()),
            "tour_length": self.tour_length,
            "completion_bound": self.completion_bound,
            "violations": [str(v) for v in self.violations],
            "failure": self.failure,
        }


def check_complete(states: Sequence[AgentState], q: TargetTuple) -> bool:
    """Every active agent parked on its own distinct target; surplus agents exited."""
    n, m = len(states), len(q)
    active = [s for s in states if not s.exited]
    currs = [s.curr for s in active]
    if len(set(currs)) != len(currs):
        return False
    if any(s.pos != q.at(s.curr) for s in active):
        return False
    if n <= m:
        return len(active) == n
    return len(active) == m


def _extra_edges(rng: np.random.Generator, states, r: float, fraction: float):
    if fraction <= 0:
        return []
    graph = disk_graph([(s.uid, s.pos) for s in states], r)
    uids = [s.uid for s in states if not s.exited]
    extra = []
    for a in range(len(uids)):
        for b in range(a + 1, len(uids)):
            ua, ub = uids[a], uids[b]
            if ub not in graph.neighbors(ua) and rng.random() < fraction:
                extra.append((ua, ub))
    return extra


def _stream(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))


def default_round_cap(tour_len: float, v: float, delta: float, n: int) -> int:
    return int(10 * (tour_len / (v * delta) + n + 10))


def run(
    sc: Scenario,
    *,
    audit: str = "standard",
    faults: Faults | None = None,
    extra_edge_fraction: float = 0.0,
    keep_rounds: bool = True,
    max_rounds: int | None = None,
) -> SimTrace:
    """Simulate ETSP Assignment on ``sc`` until completion or the round cap.

    Round k happens at time k * delta (k >= 1) for the uniform schedule.
    ``audit="strict"`` also recomputes every agent's tour from a shuffled
    copy of the targets and requires it to match the shared one.
    """
    faults = faults or Faults()
    cfg = sc.config
    v, r = cfg.v, cfg.r
    sched = Schedule.for_scenario(sc)
    if sched.t_max >= r / v:
        warnings.warn(
            f"t_max={sched.t_max} >= r/v={r / v}: parked agents may be displaced and the completion bound does not apply",
            stacklevel=2,
        )

    q = shared_tour(sc.targets)
    if audit == "strict":
        rng = _stream(cfg.seed, _STREAM_STRICT_TOUR)
        for _ in range(sc.n):
            pts = list(sc.targets)
            rng.shuffle(pts)
            if shared_tour(pts) != q:
                raise SimulationIntegrityError("per-agent tour differs from the shared tour")

    states = [initialize(i, p, q, v) for i, p in enumerate(sc.agents, start=1)]
    L = tour_length(q)
    trace = SimTrace(sc, q, L, sched.t_max, tuple(states))
    trace.path_lengths = {s.uid: 0.0 for s in states}
    trace.contacts = {s.uid: set() for s in states}
    cap = max_rounds if max_rounds is not None else default_round_cap(L, v, sched.delta, sc.n)

    auditor = Auditor(
        q,
        states,
        t_max=sched.t_max,
        conflict_horizon=sc.env.diameter / v + sched.t_max,
        level=audit,
    )
    edge_rng = _stream(cfg.seed, _STREAM_EXTRA_EDGES)
    jitter_rng = _stream(cfg.seed, _STREAM_JITTER)

    # time at which each agent reached (and stayed on) its current target
    settled_at: list[float | None] = [0.0 if s.pos == q.at(s.curr) else None for s in states]
    exit_time: list[float | None] = [None] * sc.n

    def finish(t_done: bool):
        trace.final = tuple(states)
        trace.complete = t_done
        if t_done:
            times = [
                exit_time[i] if s.exited else settled_at[i] for i, s in enumerate(states)
            ]
            trace.completion_time = max(times) if times else 0.0
        return trace

    if check_complete(states, q):
        return finish(True)

    bogus_pending = faults.bogus_loss_round is not None
    t = 0.0
    for k in range(1, cap + 1):
        if sched.jitter:
            t_next = t + sched.t_max * (0.5 + 0.5 * jitter_rng.random())
        else:
            t_next = k * sched.delta
        dt = t_next - t

        for i, s in enumerate(states):
            if s.exited:
                continue
            target = q.at(s.curr)
            if s.pos == target:
                continue
            remaining = distance(s.pos, target)
            new_pos = motion_step(s, q, dt)
            if new_pos == target:
                trace.path_lengths[s.uid] += remaining
                settled_at[i] = t + remaining / s.speed
            else:
                trace.path_lengths[s.uid] += distance(s.pos, new_pos)
            states[i] = AgentState(
                s.uid, new_pos, s.curr, s.next, s.prev, s.status, s.speed, s.exited
            )
        t = t_next

        extra = _extra_edges(edge_rng, states, r, extra_edge_fraction)
        inboxes, delivered = broadcast_round(states, q, r, extra)
        trace.message_total += delivered

        pre = list(states)
        for i, s in enumerate(pre):
            box = inboxes[s.uid]
            for msg in box:
                trace.contacts[s.uid].add(msg.uid)
            new = process_round(s, q, box, tiebreak_inverted=faults.tiebreak_inverted)
            if new.exited and not s.exited:
                exit_time[i] = t
            if new.curr != s.curr:
                settled_at[i] = t if new.pos == q.at(new.curr) else None
            states[i] = new

        if _inject(faults, k, t, states, settled_at, exit_time, bogus_pending, sched.t_max):
            bogus_pending = False

        found = auditor.audit_round(k, t, pre, states, inboxes)
        if found:
            trace.violations.extend(found)
            log.debug("round %d: %d violations", k, len(found))
        if keep_rounds:
            trace.rounds.append(
                RoundSnapshot(k, t, tuple(states), tuple(len(inboxes[s.uid]) for s in states))
            )
        trace.rounds_run = k
        if check_complete(states, q):
            return finish(True)

    trace.failure = f"round cap {cap} reached without a complete assignment"
    return finish(False)


def _inject(faults: Faults, k, t, states, settled_at, exit_time, bogus_pending, t_max) -> bool:
    """Apply scheduled faults in place; returns True once the bogus loss has fired."""
    if faults.flip_status_round == k:
        for i, s in enumerate(states):
            if 0 in s.status:
                j = s.status.index(0)
                status = s.status[:j] + (1,) + s.status[j + 1 :]
                states[i] = AgentState(
                    s.uid, s.pos, s.curr, s.next, s.prev, status, s.speed, s.exited
                )
                break
    if bogus_pending and k >= faults.bogus_loss_round:
        for i, s in enumerate(states):
            parked = settled_at[i]
            if s.exited or parked is None or t - parked < 2 * t_max:
                continue
            status = list(s.status)
            status[s.curr - 1] = 0
            new = settle(s, status)
            states[i] = new
            settled_at[i] = None
            if new.exited:
                exit_time[i] = t
            return True
    return False


class TraceWriter:
    """Line-delimited JSON: a header, one record per round, then a summary."""

    def __init__(self, fh: IO[str]):
        self.fh = fh

    def _emit(self, record: dict) -> None:
        self.fh.write(json.dumps(record, sort_keys=True) + "\n")

    def write(self, trace: SimTrace, *, timestamp: bool = True) -> None:
        sc = trace.scenario
        self._emit(
            {
                "type": "header",
                "format": TRACE_FORMAT,
                "created": datetime.now(timezone.utc).isoformat() if timestamp else None,
                "n": sc.n,
                "m": sc.m,
                "d": sc.config.d,
                "ell": sc.config.side,
                "r": sc.config.r,
                "v": sc.config.v,
                "delta": sc.config.round_gap,
                "t_max": trace.t_max,
                "seed": sc.config.seed,
                "tour": [list(p) for p in trace.tour],
            }
        )
        self._emit({"type": "round", "k": 0, "time": 0.0, **_agents(trace.initial, None)})
        for snap in trace.rounds:
            self._emit(
                {"type": "round", "k": snap.k, "time": snap.time, **_agents(snap.states, snap.inbox_sizes)}
            )
        self._emit(trace.summary())


def _agents(states: Sequence[AgentState], inbox_sizes) -> dict:
    return {
        "agents": [
            {
                "uid": s.uid,
                "pos": list(s.pos),
                "curr": s.curr,
                "next": s.next,
                "prev": s.prev,
                "exited": s.exited,
                "inbox": None if inbox_sizes is None else inbox_sizes[i],
            }
            for i, s in enumerate(states)
        ]
    }


def write_trace(trace: SimTrace, path: str | Path, *, timestamp: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        TraceWriter(fh).write(trace, timestamp=timestamp)
