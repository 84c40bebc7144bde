import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etsp_assign.baseline import (
    BRUTE_FORCE_LIMIT,
    brute_force_assignment,
    cost_matrix,
    hungarian,
)


@pytest.mark.parametrize(
    "c, cost, pairs",
    [
        ([[0, 9], [9, 0]], 0.0, {(1, 1), (2, 2)}),
        ([[7]], 7.0, {(1, 1)}),
        ([[1, 2], [3, 4]], 5.0, None),
        ([[4, 1, 3], [2, 0, 5], [3, 2, 2]], 5.0, {(1, 2), (2, 1), (3, 3)}),
    ],
)
def test_hungarian_examples(c, cost, pairs):
    a = hungarian(c)
    assert a.total_cost == cost
    if pairs is not None:
        assert a.pairs == frozenset(pairs)
    assert a.complete(len(c), len(c[0]))


def test_rectangular_more_agents():
    a = hungarian([[5.0], [1.0], [3.0]])
    assert a.pairs == frozenset({(2, 1)}) and a.total_cost == 1.0


def test_rectangular_more_targets():
    a = hungarian([[5.0, 2.0, 9.0], [4.0, 8.0, 1.0]])
    assert a.pairs == frozenset({(1, 2), (2, 3)}) and a.total_cost == 3.0


def test_empty_matrix():
    assert hungarian([]).total_cost == 0.0


def test_rejects_bad_costs():
    with pytest.raises(ValueError):
        hungarian([[1.0, float("nan")]])
    with pytest.raises(ValueError):
        hungarian([[1.0, 2.0], [3.0]])


def test_brute_force_guard():
    with pytest.raises(ValueError):
        brute_force_assignment([[0.0] * 10 for _ in range(BRUTE_FORCE_LIMIT + 1)])


def test_matches_brute_force_eight_by_eight():
    rnd = random.Random(1)
    for _ in range(10):
        c = [[rnd.uniform(0, 50) for _ in range(8)] for _ in range(8)]
        assert hungarian(c).total_cost == pytest.approx(brute_force_assignment(c).total_cost, abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_matches_brute_force_rectangular(n, m, data):
    c = [[data.draw(st.floats(0, 100)) for _ in range(m)] for _ in range(n)]
    h, b = hungarian(c), brute_force_assignment(c)
    assert h.complete(n, m)
    assert abs(h.total_cost - b.total_cost) <= 1e-9


def test_cost_matrix_euclidean():
    assert cost_matrix([(0, 0)], [(3, 4), (0, 1)]) == [[5.0, 1.0]]
