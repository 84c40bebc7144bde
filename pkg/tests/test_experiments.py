import io
import json
import math

import pytest

from etsp_assign.core import ScenarioError
from etsp_assign.experiments import SWEEP_COLUMNS, SweepSpec, loglog_slope, run_sweep


def test_slope_of_exact_power_law():
    ns = [10, 20, 40, 80]
    assert loglog_slope(ns, [3 * n**1.5 for n in ns]) == pytest.approx(1.5)


def test_slope_needs_two_points():
    with pytest.raises(ValueError):
        loglog_slope([10], [1.0])


@pytest.mark.parametrize(
    "kwargs",
    [dict(n_values=()), dict(n_values=(4, 4)), dict(n_values=(9, 4)),
     dict(n_values=(4,), repetitions=0), dict(n_values=(4,), kind="file")],
)
def test_spec_rejections(kwargs):
    with pytest.raises(ScenarioError):
        SweepSpec(**kwargs)


def test_spec_seeds():
    spec = SweepSpec(n_values=(4, 9), repetitions=3, seed_base=10)
    assert [(cfg.n, cfg.seed) for _, cfg in spec.configs()] == [
        (4, 10), (4, 11), (4, 12), (9, 10), (9, 11), (9, 12)
    ]


def test_spec_load(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"n_values": [4, 9], "d": 2, "repetitions": 2}))
    assert SweepSpec.load(path).n_values == (4, 9)
    path.write_text(json.dumps({"n_values": [4], "bogus": 1}))
    with pytest.raises(ScenarioError):
        SweepSpec.load(path)


def test_small_sweep_table():
    result = run_sweep(SweepSpec(n_values=(4, 9, 16), repetitions=2))
    assert result.aborted is None
    assert len(result.rows) == 6
    assert all(r["complete"] and r["violations"] == 0 for r in result.rows)
    assert math.isfinite(result.slope)
    buf = io.StringIO()
    result.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].split(",") == list(SWEEP_COLUMNS)
    assert len(lines) == 7


def test_single_n_has_no_slope():
    result = run_sweep(SweepSpec(n_values=(9,), kind="uniform"))
    assert result.slope is None
    assert result.summary()["loglog_slope"] is None


def test_parallel_sweep_matches_serial():
    spec = SweepSpec(n_values=(4, 9), repetitions=2)
    a, b = run_sweep(spec), run_sweep(spec, jobs=2)
    assert [r["completion_time"] for r in a.rows] == [r["completion_time"] for r in b.rows]
