"""Bundled self-check suite behind ``etsp-assign validate``."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .baseline import brute_force_assignment, hungarian
from .engine import Faults, run
from .scenarios import Scenario, ScenarioConfig, make_scenario, rescale
from .tour import exact_tour, shared_tour, tour_length

FAULTS = ("tiebreak-inverted", "noncanonical-tour")


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def tie_scenario() -> Scenario:
    """Two agents equidistant from target (5, 5) who reach it in the same round."""
    cfg = ScenarioConfig(n=2, d=2, ell=60.0, r=10.0, v=1.0, kind="file")
    return Scenario(cfg, ((3.0, 5.0), (7.0, 5.0)), ((5.0, 5.0), (50.0, 50.0))).validate()


def check_random_runs(faults: Faults, count: int = 24, seed: int = 7) -> CheckResult:
    rnd = random.Random(seed)
    for i in range(count):
        n = rnd.randint(1, 25)
        m = n if i % 3 else rnd.randint(1, 30)
        cfg = ScenarioConfig(n=n, m=m, d=rnd.choice((1, 2, 3)), r=10.0, v=1.0, seed=seed * 1000 + i)
        tr = run(make_scenario(cfg), audit="strict", faults=faults)
        if not tr.complete or tr.violations:
            first = tr.violations[0] if tr.violations else tr.failure
            return CheckResult("invariants-random-runs", False, f"n={n} m={m}: {first}")
    return CheckResult("invariants-random-runs", True, f"{count} runs clean")


def check_tie(faults: Faults) -> CheckResult:
    tr = run(tie_scenario(), audit="strict", faults=faults)
    if tr.violations:
        return CheckResult("invariants-tie-scenario", False, str(tr.violations[0]))
    if not tr.complete:
        return CheckResult("invariants-tie-scenario", False, tr.failure or "incomplete")
    return CheckResult("invariants-tie-scenario", True, f"agent 2 holds target {tr.assignment()[2]}")


def check_tour_approx(count: int = 20, seed: int = 11) -> CheckResult:
    rnd = random.Random(seed)
    for _ in range(count):
        d = rnd.choice((2, 3))
        pts = [tuple(rnd.uniform(0, 10) for _ in range(d)) for _ in range(rnd.randint(1, 8))]
        approx = tour_length(shared_tour(pts))
        best = exact_tour(pts).length
        if approx > 2 * best + 1e-9:
            return CheckResult("tour-2-approx", False, f"{approx} > 2 * {best}")
    return CheckResult("tour-2-approx", True, f"{count} sets")


def check_tour_determinism(canonicalize: bool, count: int = 10, seed: int = 13) -> CheckResult:
    rnd = random.Random(seed)
    for _ in range(count):
        pts = [(rnd.uniform(0, 10), rnd.uniform(0, 10)) for _ in range(9)]
        ref = shared_tour(pts, canonicalize=canonicalize)
        shuffled = pts[:]
        rnd.shuffle(shuffled)
        if shared_tour(shuffled, canonicalize=canonicalize).points != ref.points:
            return CheckResult("tour-determinism", False, "tour depends on input order")
    return CheckResult("tour-determinism", True, f"{count} permutations")


def check_hungarian(count: int = 30, seed: int = 17) -> CheckResult:
    rnd = random.Random(seed)
    for _ in range(count):
        n, m = rnd.randint(1, 6), rnd.randint(1, 6)
        c = [[rnd.uniform(0, 100) for _ in range(m)] for _ in range(n)]
        a, b = hungarian(c).total_cost, brute_force_assignment(c).total_cost
        if abs(a - b) > 1e-9:
            return CheckResult("hungarian-vs-brute-force", False, f"{a} vs {b}")
    return CheckResult("hungarian-vs-brute-force", True, f"{count} matrices")


def check_rescaling(count: int = 5, seed: int = 19) -> CheckResult:
    for i in range(count):
        sc = make_scenario(ScenarioConfig(n=6 + i, d=1 + i % 3, r=10.0, v=1.0, seed=seed + i))
        a = run(sc, audit="off").completion_time
        b = run(rescale(sc, sc.config.side), audit="off").completion_time
        if abs(a - b) > 1e-9 * abs(a):
            return CheckResult("unit-cube-rescaling", False, f"{a} vs {b}")
    return CheckResult("unit-cube-rescaling", True, f"{count} scenarios")


def validate(fault: str | None = None) -> list[CheckResult]:
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; choose from {FAULTS}")
    faults = Faults(tiebreak_inverted=fault == "tiebreak-inverted")
    return [
        check_tie(faults),
        check_random_runs(faults),
        check_tour_approx(),
        check_tour_determinism(canonicalize=fault != "noncanonical-tour"),
        check_hungarian(),
        check_rescaling(),
    ]

