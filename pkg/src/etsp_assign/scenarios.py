"""Scenario generation and scenario files.

Random draws use numpy's PCG64 bit generator seeded directly with the
scenario seed (``RNG_NAME``); see FORMATS.md for the exact draw order.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .core import Environment, Point, ScenarioError, as_point, distance
from .protocol import initialize
from .tour import shared_tour

RNG_NAME = "numpy-PCG64/v1"
SCENARIO_FORMAT = "etsp-assign.scenario/1"
KINDS = ("uniform", "lattice", "file")
DEFAULT_EPSILON = 1.0


def growth_side(n: int, d: int, r: float, epsilon: float = DEFAULT_EPSILON) -> float:
    """Environment side (1 + epsilon) * r * n^(1/d)."""
    return (1.0 + epsilon) * r * n ** (1.0 / d)


def cells_per_side(n: int, d: int) -> int:
    """Smallest k with k**d >= n, i.e. ceil(n^(1/d)) without float rounding."""
    k = max(1, int(round(n ** (1.0 / d))))
    while k**d < n:
        k += 1
    while k > 1 and (k - 1) ** d >= n:
        k -= 1
    return k


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    m: int | None = None  # defaults to n
    d: int = 2
    ell: float | None = None  # None -> growth_side(n, d, r, epsilon)
    r: float = 1.0
    v: float = 1.0
    delta: float | None = None  # None -> 0.5 * r / v
    seed: int = 0
    kind: str = "uniform"
    epsilon: float = DEFAULT_EPSILON
    jitter: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ScenarioError(f"unknown scenario kind {self.kind!r}")
        if self.n < 1:
            raise ScenarioError("need at least one agent")
        if self.targets < 1:
            raise ScenarioError("need at least one target")
        if self.d < 1:
            raise ScenarioError("dimension must be >= 1")
        if not (self.r > 0 and self.v > 0):
            raise ScenarioError("r and v must be positive")
        if self.delta is not None and not self.delta > 0:
            raise ScenarioError("delta must be positive")
        if not 0 <= self.seed < 2**64:
            raise ScenarioError("seed must be a 64-bit unsigned integer")

    @property
    def targets(self) -> int:
        return self.n if self.m is None else self.m

    @property
    def side(self) -> float:
        if self.ell is not None:
            return float(self.ell)
        return growth_side(self.n, self.d, self.r, self.epsilon)

    @property
    def round_gap(self) -> float:
        return self.delta if self.delta is not None else 0.5 * self.r / self.v

    def growth_margin_ok(self) -> bool:
        """Whether side >= (1 + epsilon) r m^(1/d); reported, never enforced."""
        return self.side >= growth_side(self.targets, self.d, self.r, self.epsilon) * (1 - 1e-12)


@dataclass(frozen=True)
class Scenario:
    """A fully materialized instance: agent uid i starts at ``agents[i - 1]``."""

    config: ScenarioConfig
    agents: tuple[Point, ...]
    targets: tuple[Point, ...]
    notes: dict = field(default_factory=dict, compare=False)

    @property
    def env(self) -> Environment:
        return Environment(self.config.d, self.config.side)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.targets)

    def validate(self) -> "Scenario":
        env = self.env
        cfg = self.config
        if self.n != cfg.n or self.m != cfg.targets:
            raise ScenarioError(
                f"config says n={cfg.n}, m={cfg.targets} but got {self.n} agents, {self.m} targets"
            )
        if self.n == 0 or self.m == 0:
            raise ScenarioError("empty scenario")
        for label, pts in (("agent", self.agents), ("target", self.targets)):
            for i, p in enumerate(pts, start=1):
                if len(p) != env.d:
                    raise ScenarioError(f"{label} {i} has dimension {len(p)}, expected {env.d}")
                if not env.contains(p):
                    raise ScenarioError(f"{label} {i} at {p} lies outside [0, {env.side}]^{env.d}")
        if len(set(self.targets)) != self.m:
            raise ScenarioError("targets are not pairwise distinct")
        return self


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _rows(a: np.ndarray) -> tuple[Point, ...]:
    return tuple(tuple(float(c) for c in row) for row in a)


def uniform_random(cfg: ScenarioConfig) -> tuple[tuple[Point, ...], tuple[Point, ...]]:
    """Agents then targets, i.i.d. uniform in the cube; targets redrawn on collision."""
    rng = _rng(cfg.seed)
    side = cfg.side
    agents = rng.uniform(0.0, side, size=(cfg.n, cfg.d))
    while True:
        targets = rng.uniform(0.0, side, size=(cfg.targets, cfg.d))
        if len({tuple(row) for row in targets}) == cfg.targets:
            break
    return _rows(agents), _rows(targets)


def lattice_targets(n: int, d: int, side: float) -> tuple[Point, ...]:
    """Centres of the first n cells of a k^d grid, first coordinate fastest."""
    k = cells_per_side(n, d)
    cell = side / k
    out = []
    for idx in itertools.product(range(k), repeat=d):
        out.append(tuple((c + 0.5) * cell for c in reversed(idx)))
        if len(out) == n:
            break
    return tuple(out)


def lattice_lower_bound(n: int, d: int, side: float) -> float:
    """Path length agent 1 must cover in the lattice construction (vacuous below 2 * 3^d)."""
    return max(0.0, (n // 3**d - 1) * side / cells_per_side(n, d))


def _forward_arc(tour, start: int, goal: int) -> float:
    m = len(tour)
    total = 0.0
    j = start
    while j != goal:
        nxt = j % m + 1
        total += distance(tour.at(j), tour.at(nxt))
        j = nxt
    return total


def lattice_worst_case(
    n: int, d: int, r: float, epsilon: float = DEFAULT_EPSILON, seed: int | None = None
) -> tuple[tuple[Point, ...], tuple[Point, ...], dict]:
    """Lower-bound instance: agents 2..n parked on tour targets 2..n, agent 1 adversarial.

    Agent 1 goes to whichever point of a fixed candidate set (tour-edge
    midpoints and quarter-cell offsets around every target) makes the
    forward tour arc from its initial target to target 1 longest. A seed
    adds a small jitter to that point, kept only if it does not change the
    initial target. Returns (agents, targets, info).
    """
    if n < 2:
        raise ScenarioError("lattice construction needs n >= 2")
    if not epsilon > 0:
        raise ScenarioError("epsilon must be positive")
    side = growth_side(n, d, r, epsilon)
    targets = lattice_targets(n, d, side)
    tour = shared_tour(targets)
    cell = side / cells_per_side(n, d)
    target_set = set(tour.points)

    candidates: list[Point] = []
    for j in range(1, n + 1):
        a, b = tour.at(j), tour.at(j % n + 1)
        candidates.append(tuple((x + y) / 2 for x, y in zip(a, b)))
    for j in range(1, n + 1):
        c = tour.at(j)
        for signs in itertools.product((-1.0, 1.0), repeat=d):
            candidates.append(tuple(x + s * 0.25 * cell for x, s in zip(c, signs)))

    env = Environment(d, side)
    best, best_score, best_curr = None, -1.0, None
    for p in candidates:
        if p in target_set or not env.contains(p):
            continue
        curr = initialize(1, p, tour, 1.0).curr
        score = _forward_arc(tour, curr, 1)
        if score > best_score:
            best, best_score, best_curr = p, score, curr

    if seed is not None:
        rng = _rng(seed)
        jitter = rng.uniform(-0.05 * cell, 0.05 * cell, size=d)
        moved = tuple(float(x + dx) for x, dx in zip(best, jitter))
        if (
            env.contains(moved)
            and moved not in target_set
            and initialize(1, moved, tour, 1.0).curr == best_curr
        ):
            best = moved

    agents = (best,) + tuple(tour.at(j) for j in range(2, n + 1))
    info = {
        "side": side,
        "cell": cell,
        "agent1_initial_curr": best_curr,
        "agent1_arc": best_score,
        "lower_bound_path": lattice_lower_bound(n, d, side),
    }
    return agents, targets, info


def make_scenario(cfg: ScenarioConfig) -> Scenario:
    if cfg.kind == "uniform":
        agents, targets = uniform_random(cfg)
        return Scenario(cfg, agents, targets).validate()
    if cfg.kind == "lattice":
        if cfg.m is not None and cfg.m != cfg.n:
            raise ScenarioError("lattice scenarios have m = n")
        agents, targets, info = lattice_worst_case(cfg.n, cfg.d, cfg.r, cfg.epsilon, cfg.seed)
        cfg = replace(cfg, ell=info["side"])
        return Scenario(cfg, agents, targets, notes=info).validate()
    raise ScenarioError("file scenarios are created with load_scenario")


def rescale(sc: Scenario, factor: float) -> Scenario:
    """Divide all lengths by ``factor``; with v scaled too, times are unchanged.

    The round gap is r/v-relative so it stays put. Used to check that a run
    at (ell, r, v) matches a run at (1, r/ell, v/ell) on scaled positions.
    """
    cfg = sc.config
    new_cfg = replace(
        cfg,
        ell=cfg.side / factor,
        r=cfg.r / factor,
        v=cfg.v / factor,
        delta=cfg.round_gap,
    )
    scale = lambda pts: tuple(tuple(c / factor for c in p) for p in pts)  # noqa: E731
    return Scenario(new_cfg, scale(sc.agents), scale(sc.targets), notes=dict(sc.notes)).validate()


def scenario_to_dict(sc: Scenario) -> dict:
    cfg = sc.config
    return {
        "format": SCENARIO_FORMAT,
        "rng": RNG_NAME,
        "config": {
            "n": sc.n,
            "m": sc.m,
            "d": cfg.d,
            "ell": cfg.side,
            "r": cfg.r,
            "v": cfg.v,
            "delta": cfg.round_gap,
            "seed": cfg.seed,
            "kind": cfg.kind,
            "epsilon": cfg.epsilon,
            "jitter": cfg.jitter,
        },
        "agents": [list(p) for p in sc.agents],
        "targets": [list(p) for p in sc.targets],
    }


def save_scenario(sc: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=1) + "\n", encoding="utf-8")


def _points(raw, name: str, d: int) -> tuple[Point, ...]:
    if not isinstance(raw, list):
        raise ScenarioError(f"field {name!r}: expected a list of points")
    out = []
    for i, p in enumerate(raw, start=1):
        if not isinstance(p, list) or len(p) != d:
            raise ScenarioError(f"field {name!r}, entry {i}: expected {d} coordinates, got {p!r}")
        if not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in p):
            raise ScenarioError(f"field {name!r}, entry {i}: non-numeric coordinate in {p!r}")
        out.append(as_point(p))
    return tuple(out)


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario file must hold a JSON object")
    fmt = data.get("format")
    if fmt != SCENARIO_FORMAT:
        raise ScenarioError(f"field 'format': expected {SCENARIO_FORMAT!r}, got {fmt!r}")
    raw = data.get("config")
    if not isinstance(raw, dict):
        raise ScenarioError("field 'config': missing or not an object")
    known = {f for f in ScenarioConfig.__dataclass_fields__}
    unknown = set(raw) - known
    if unknown:
        raise ScenarioError(f"field 'config': unknown keys {sorted(unknown)}")
    for key in ("n", "d", "r", "v"):
        if key not in raw:
            raise ScenarioError(f"field 'config.{key}' is required")
    try:
        cfg = ScenarioConfig(**raw)
    except TypeError as exc:
        raise ScenarioError(f"field 'config': {exc}") from None
    agents = _points(data.get("agents"), "agents", cfg.d)
    targets = _points(data.get("targets"), "targets", cfg.d)
    return Scenario(cfg, agents, targets).validate()


def load_scenario(path: str | Path) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    try:
        return scenario_from_dict(data)
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from None


def initial_curr_distances(sc: Scenario) -> list[float]:
    """Distance from every agent to the target it initially picks."""
    tour = shared_tour(sc.targets)
    return [distance(p, tour.at(initialize(1, p, tour, 1.0).curr)) for p in sc.agents]

