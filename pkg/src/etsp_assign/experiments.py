"""Completion-time sweeps over n and the log-log slope fit."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .core import ScenarioError
from .engine import run
from .scenarios import ScenarioConfig, make_scenario

SWEEP_COLUMNS = (
    "n",
    "repetition",
    "seed",
    "ell",
    "completion_time",
    "tour_length",
    "messages",
    "complete",
    "violations",
    "agent1_path",
    "lower_bound_path",
    "agent1_contacts",
)


@dataclass(frozen=True)
class SweepSpec:
    n_values: tuple[int, ...]
    d: int = 2
    kind: str = "lattice"
    epsilon: float = 1.0  # side grows as (1 + epsilon) r n^(1/d)
    repetitions: int = 1
    seed_base: int = 0
    r: float = 1.0
    v: float = 1.0

    def __post_init__(self):
        ns = tuple(self.n_values)
        object.__setattr__(self, "n_values", ns)
        if not ns:
            raise ScenarioError("n_values is empty")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ScenarioError("n_values must be strictly increasing")
        if self.repetitions < 1:
            raise ScenarioError("repetitions must be >= 1")
        if self.kind not in ("lattice", "uniform"):
            raise ScenarioError(f"sweep kind must be lattice or uniform, got {self.kind!r}")

    def configs(self) -> list[tuple[int, ScenarioConfig]]:
        return [
            (
                rep,
                ScenarioConfig(
                    n=n,
                    d=self.d,
                    r=self.r,
                    v=self.v,
                    seed=self.seed_base + rep,
                    kind=self.kind,
                    epsilon=self.epsilon,
                ),
            )
            for n in self.n_values
            for rep in range(self.repetitions)
        ]

    @classmethod
    def load(cls, path: str | Path) -> "SweepSpec":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ScenarioError(f"{path}: {exc}") from None


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[dict] = field(default_factory=list)
    slope: float | None = None
    aborted: str | None = None

    def mean_times(self) -> dict[int, float]:
        by_n: dict[int, list[float]] = {}
        for row in self.rows:
            by_n.setdefault(row["n"], []).append(row["completion_time"])
        return {n: float(np.mean(ts)) for n, ts in sorted(by_n.items())}

    def write_csv(self, fh: IO[str]) -> None:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow({k: row[k] for k in SWEEP_COLUMNS})

    def summary(self) -> dict:
        return {
            "spec": asdict(self.spec),
            "mean_completion_time": {str(n): t for n, t in self.mean_times().items()},
            "loglog_slope": self.slope,
            "aborted": self.aborted,
        }


def loglog_slope(ns: Sequence[float], times: Sequence[float]) -> float:
    """Least-squares slope of log(time) against log(n)."""
    if len(ns) < 2:
        raise ValueError("need at least two points for a slope")
    return float(np.polyfit(np.log(ns), np.log(times), 1)[0])


def _one(job: tuple[int, ScenarioConfig]) -> dict:
    rep, cfg = job
    sc = make_scenario(cfg)
    tr = run(sc, keep_rounds=False)
    return {
        "n": cfg.n,
        "repetition": rep,
        "seed": cfg.seed,
        "ell": sc.config.side,
        "completion_time": tr.completion_time if tr.complete else math.nan,
        "tour_length": tr.tour_length,
        "messages": tr.message_total,
        "complete": tr.complete,
        "violations": len(tr.violations),
        "agent1_path": tr.path_lengths[1],
        "lower_bound_path": sc.notes.get("lower_bound_path", ""),
        "agent1_contacts": len(tr.contacts[1]),
        "failure": tr.failure,
    }


def run_sweep(spec: SweepSpec, *, jobs: int = 1) -> SweepResult:
    """Run every (n, repetition) point; rows come back sorted by (n, repetition).

    A failed run (incomplete or with audit violations) stops the sweep and
    the partial table is returned with ``aborted`` set.
    """
    work = spec.configs()
    result = SweepResult(spec)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_one, job) for job in work]
            for fut in futures:
                row = fut.result()
                result.rows.append(row)
                if not row["complete"] or row["violations"]:
                    result.aborted = _reason(row)
                    for f in futures:
                        f.cancel()
                    break
    else:
        for job in work:
            row = _one(job)
            result.rows.append(row)
            if not row["complete"] or row["violations"]:
                result.aborted = _reason(row)
                break
    result.rows.sort(key=lambda r: (r["n"], r["repetition"]))
    if result.aborted is None and len(spec.n_values) > 1:
        means = result.mean_times()
        result.slope = loglog_slope(list(means), list(means.values()))
    return result


def _reason(row: dict) -> str:
    what = row["failure"] or f"{row['violations']} audit violations"
    return f"n={row['n']} repetition={row['repetition']}: {what}"
