"""Omniscient per-round invariant checks for a running simulation.

Clause names used in :class:`Violation`:

``assigned-monotone``   an assigned target never becomes unassigned
``curr-available``      an active agent's own target is marked available
``gap-marked``          everything strictly between prev and next (except curr) is marked assigned
``mark-backed``         a target is marked assigned only if another agent holds it
``status-monotone``     status bits never go from 0 back to 1
``sender-gap-absorbed`` after a message, the sender's prev..next gap is marked assigned
``parked-stays``        an agent parked on its target for t_max never leaves again
``shared-contested``    two agents sharing a target meet in a conflict within diam/v + t_max
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import between_exclusive
from .protocol import AgentState, Message
from .tour import TargetTuple

AUDIT_LEVELS = ("off", "standard", "strict")
_TIME_RTOL = 1e-9


@dataclass(frozen=True)
class Violation:
    clause: str
    round: int
    uid: int | None
    detail: str

    def __str__(self) -> str:
        who = f"agent {self.uid}" if self.uid is not None else "global"
        return f"[{self.clause}] round {self.round}, {who}: {self.detail}"


def _gap_ok(s: AgentState) -> int | None:
    """First index in the prev..next gap that is wrongly marked available."""
    for j in between_exclusive(s.prev, s.next, s.m):
        if j != s.curr and s.status[j - 1]:
            return j
    return None


class Auditor:
    """Stateful checker fed one round at a time by the engine.

    ``standard`` re-checks the per-agent clauses only for agents whose
    protocol state changed in the round (unchanged states cannot newly
    violate them); ``strict`` re-checks every agent every round.
    """

    def __init__(
        self,
        q: TargetTuple,
        initial: Sequence[AgentState],
        *,
        t_max: float,
        conflict_horizon: float,
        level: str = "standard",
    ):
        if level not in AUDIT_LEVELS:
            raise ValueError(f"unknown audit level {level!r}")
        self.q = q
        self.level = level
        self.t_max = t_max
        self.conflict_horizon = conflict_horizon
        self.m = len(q)
        self._status = np.array([s.status for s in initial], dtype=np.int8).reshape(
            len(initial), self.m
        )
        self._streak: dict[int, tuple[int, float, bool]] = {}
        self._shared_since: dict[int, float] = {}
        self._update_shared(initial, 0.0, set())

    def _update_shared(self, states, t, conflicted: set[int]) -> None:
        holders: dict[int, int] = {}
        for s in states:
            if not s.exited:
                holders[s.curr] = holders.get(s.curr, 0) + 1
        shared = {j for j, c in holders.items() if c >= 2}
        for j in list(self._shared_since):
            if j not in shared or j in conflicted:
                del self._shared_since[j]
        for j in shared:
            self._shared_since.setdefault(j, t)

    def audit_round(
        self,
        k: int,
        t: float,
        pre: Sequence[AgentState],
        post: Sequence[AgentState],
        inboxes: Mapping[int, Sequence[Message]],
    ) -> list[Violation]:
        if self.level == "off":
            return []
        out: list[Violation] = []
        strict = self.level == "strict"

        # assigned set is monotone
        before = {s.curr for s in pre if not s.exited}
        after = {s.curr for s in post if not s.exited}
        for j in sorted(before - after):
            out.append(Violation("assigned-monotone", k, None, f"target {j} lost its assignment"))

        changed = []
        for idx, (a, b) in enumerate(zip(pre, post)):
            if strict or a.status is not b.status or (a.curr, a.next, a.prev, a.exited) != (
                b.curr,
                b.next,
                b.prev,
                b.exited,
            ):
                changed.append(idx)

        for idx in changed:
            a, b = pre[idx], post[idx]
            if a.status is not b.status:
                self._status[idx] = b.status
                for j, (x, y) in enumerate(zip(a.status, b.status), start=1):
                    if x == 0 and y == 1:
                        out.append(Violation("status-monotone", k, b.uid, f"status({j}) went 0 -> 1"))
            if b.exited:
                if any(b.status):
                    out.append(
                        Violation("gap-marked", k, b.uid, "exited with available targets left")
                    )
                continue
            if b.status[b.curr - 1] != 1:
                out.append(Violation("curr-available", k, b.uid, f"status(curr={b.curr}) is 0"))
            j = _gap_ok(b)
            if j is not None:
                out.append(
                    Violation(
                        "gap-marked",
                        k,
                        b.uid,
                        f"status({j}) is 1 inside gap prev={b.prev} next={b.next}",
                    )
                )

        # every 0 is backed by some other agent currently holding the target
        active = np.array([not s.exited for s in post])
        currs = np.array([s.curr - 1 for s in post])
        holders = np.bincount(currs[active], minlength=self.m)
        others = np.broadcast_to(holders, self._status.shape).copy()
        rows = np.nonzero(active)[0]
        others[rows, currs[rows]] -= 1
        bad = (self._status == 0) & (others == 0)
        if bad.any():
            for idx, j in zip(*np.nonzero(bad)):
                out.append(
                    Violation(
                        "mark-backed",
                        k,
                        post[idx].uid,
                        f"status({j + 1}) is 0 but no other agent holds it",
                    )
                )

        # sender gaps are absorbed
        conflicted: set[int] = set()
        for a, b in zip(pre, post):
            if a.exited:
                continue
            for msg in inboxes.get(a.uid, ()):
                if msg.curr == a.curr:
                    conflicted.add(a.curr)
                for j in between_exclusive(msg.prev, msg.next, self.m):
                    if j != a.curr and b.status[j - 1]:
                        out.append(
                            Violation(
                                "sender-gap-absorbed",
                                k,
                                b.uid,
                                f"status({j}) still 1 after message from {msg.uid}",
                            )
                        )
                        break

        # parked for t_max -> parked forever
        for b in post:
            parked = not b.exited and b.pos == self.q.at(b.curr)
            streak = self._streak.get(b.uid)
            if streak is not None:
                curr, anchor, locked = streak
                if parked and b.curr == curr:
                    if not locked and t - anchor >= self.t_max * (1 - _TIME_RTOL):
                        self._streak[b.uid] = (curr, anchor, True)
                    continue
                if locked:
                    out.append(
                        Violation(
                            "parked-stays",
                            k,
                            b.uid,
                            f"left target {curr} after parking there since t={anchor:g}",
                        )
                    )
                del self._streak[b.uid]
            if parked:
                self._streak[b.uid] = (b.curr, t, False)

        # a shared target is contested within the horizon
        self._update_shared(post, t, conflicted)
        for j, since in sorted(self._shared_since.items()):
            if t - since > self.conflict_horizon * (1 + _TIME_RTOL):
                out.append(
                    Violation(
                        "shared-contested",
                        k,
                        None,
                        f"target {j} shared since t={since:g} without a conflict",
                    )
                )
                self._shared_since[j] = t
        return out
