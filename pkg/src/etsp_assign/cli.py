"""Command line: ``etsp-assign run | sweep | validate``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from .audit import AUDIT_LEVELS
from .baseline import cost_matrix, hungarian
from .core import ScenarioError, distance
from .engine import run, write_trace
from .experiments import SweepSpec, run_sweep
from .scenarios import ScenarioConfig, load_scenario, make_scenario, save_scenario
from .validation import FAULTS, validate

log = logging.getLogger("etsp_assign")


def _scenario_from_args(args):
    if args.scenario:
        return load_scenario(args.scenario)
    if args.n is None:
        raise ScenarioError("either --scenario or --n is required")
    cfg = ScenarioConfig(
        n=args.n,
        m=args.m,
        d=args.d,
        ell=args.ell,
        r=args.r,
        v=args.v,
        delta=args.delta,
        seed=args.seed,
        kind=args.kind,
        epsilon=args.epsilon,
        jitter=args.jitter,
    )
    return make_scenario(cfg)


def run_summary(trace) -> dict:
    sc = trace.scenario
    summary = trace.summary()
    optimal = hungarian(cost_matrix(sc.agents, sc.targets)).total_cost
    outcome = math.fsum(
        distance(sc.agents[uid - 1], trace.tour.at(j)) for uid, j in trace.assignment().items()
    )
    summary.update(
        {
            "n": sc.n,
            "m": sc.m,
            "hungarian_optimal_cost": optimal,
            "protocol_assignment_cost": outcome,
            "violation_count": len(trace.violations),
        }
    )
    return summary


def cmd_run(args) -> int:
    sc = _scenario_from_args(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace = run(sc, audit=args.audit, extra_edge_fraction=args.extra_edges)
    save_scenario(sc, out / "scenario.json")
    write_trace(trace, out / "trace.jsonl")
    summary = run_summary(trace)
    (out / "summary.json").write_text(json.dumps(summary, sort_keys=True) + "\n", encoding="utf-8")
    print(json.dumps({k: summary[k] for k in (
        "complete", "completion_time", "message_total", "max_path_length",
        "hungarian_optimal_cost", "protocol_assignment_cost", "violation_count",
    )}, sort_keys=True))
    for v in trace.violations[:20]:
        print(f"violation: {v}", file=sys.stderr)
    return 0 if trace.complete and not trace.violations else 1


def cmd_sweep(args) -> int:
    if args.spec:
        spec = SweepSpec.load(args.spec)
    else:
        if not args.n_values:
            raise ScenarioError("either --spec or --n-values is required")
        spec = SweepSpec(
            n_values=tuple(args.n_values),
            d=args.d,
            kind=args.kind,
            epsilon=args.epsilon,
            repetitions=args.repetitions,
            seed_base=args.seed_base,
            r=args.r,
            v=args.v,
        )
    jobs = args.jobs or os.cpu_count() or 1
    result = run_sweep(spec, jobs=jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.csv", "w", encoding="utf-8") as fh:
        result.write_csv(fh)
    (out / "sweep_summary.json").write_text(
        json.dumps(result.summary(), sort_keys=True) + "\n", encoding="utf-8"
    )
    result.write_csv(sys.stdout)
    if result.slope is not None:
        print(f"loglog_slope,{result.slope:.6f}")
    if result.aborted:
        print(f"sweep aborted (partial table): {result.aborted}", file=sys.stderr)
        return 1
    return 0


def cmd_validate(args) -> int:
    results = validate(args.inject_fault)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name}: {r.detail}")
    failed = [r.name for r in results if not r.ok]
    if failed:
        print(f"failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="etsp-assign", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one scenario")
    r.add_argument("--scenario", help="scenario JSON file")
    r.add_argument("--kind", choices=("uniform", "lattice"), default="uniform")
    r.add_argument("--n", type=int)
    r.add_argument("--m", type=int)
    r.add_argument("--d", type=int, default=2)
    r.add_argument("--ell", type=float, help="side length (default: growth rule)")
    r.add_argument("--epsilon", type=float, default=1.0)
    r.add_argument("--r", type=float, default=1.0)
    r.add_argument("--v", type=float, default=1.0)
    r.add_argument("--delta", type=float, help="round spacing (default 0.5 r / v)")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--jitter", action="store_true", help="random round gaps in [t_max/2, t_max]")
    r.add_argument("--extra-edges", type=float, default=0.0, metavar="FRACTION")
    r.add_argument("--audit", choices=AUDIT_LEVELS, default="standard")
    r.add_argument("--out", default="out")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="completion time against n")
    s.add_argument("--spec", help="sweep spec JSON file")
    s.add_argument("--n-values", type=int, nargs="+")
    s.add_argument("--kind", choices=("uniform", "lattice"), default="lattice")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--epsilon", type=float, default=1.0)
    s.add_argument("--repetitions", type=int, default=1)
    s.add_argument("--seed-base", type=int, default=0)
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--v", type=float, default=1.0)
    s.add_argument("--jobs", type=int, default=0, help="worker processes (0 = all cores)")
    s.add_argument("--out", default="out")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate", help="run the bundled invariant and oracle checks")
    v.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
