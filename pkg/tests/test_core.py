import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from etsp_assign.core import (
    Environment,
    ScenarioError,
    between_exclusive,
    distance,
    index_add,
)


@pytest.mark.parametrize(
    "i, k, m, expected",
    [(7, 1, 7, 1), (1, -1, 7, 7), (3, 0, 5, 3), (2, 15, 7, 3), (1, 1, 1, 1)],
)
def test_index_add(i, k, m, expected):
    assert index_add(i, k, m) == expected


@pytest.mark.parametrize(
    "a, b, m, expected",
    [
        (2, 5, 7, [3, 4]),
        (6, 2, 7, [7, 1]),
        (3, 4, 7, []),
        (3, 3, 7, [4, 5, 6, 7, 1, 2]),
        (1, 1, 1, []),
        (2, 2, 2, [1]),
    ],
)
def test_between_exclusive(a, b, m, expected):
    assert between_exclusive(a, b, m) == expected


@given(st.integers(1, 60), st.data())
def test_index_add_round_trip(m, data):
    i = data.draw(st.integers(1, m))
    k = data.draw(st.integers(-500, 500))
    j = index_add(i, k, m)
    assert 1 <= j <= m
    assert index_add(j, -k, m) == i


@given(st.integers(1, 40), st.data())
def test_between_exclusive_matches_walk(m, data):
    a = data.draw(st.integers(1, m))
    b = data.draw(st.integers(1, m))
    got = between_exclusive(a, b, m)
    assert len(got) == (b - a - 1) % m
    # oracle: step forward one index at a time
    walk, j = [], a
    while True:
        j = j % m + 1
        if j == b:
            break
        walk.append(j)
        if len(walk) > m:
            break
    if a == b:
        walk = walk[: m - 1]
    assert got == walk


@pytest.mark.parametrize(
    "p, q, expected",
    [((0, 0), (3, 4), 5.0), ((1, 1, 1), (1, 1, 1), 0.0), ((0,), (10,), 10.0)],
)
def test_distance(p, q, expected):
    assert distance(p, q) == expected


def test_distance_dimension_mismatch():
    with pytest.raises(ScenarioError):
        distance((0, 0), (1, 1, 1))


coords = st.floats(-1e3, 1e3, allow_nan=False)


@given(st.lists(coords, min_size=3, max_size=3), st.lists(coords, min_size=3, max_size=3),
       st.lists(coords, min_size=3, max_size=3))
def test_distance_metric(a, b, c):
    assert distance(a, b) == distance(b, a) >= 0
    assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9


def test_environment():
    env = Environment(2, 10.0)
    assert env.contains((0.0, 10.0))
    assert not env.contains((10.5, 1.0))
    assert not env.contains((1.0,))
    assert env.diameter == pytest.approx(10 * math.sqrt(2))
    with pytest.raises(ScenarioError):
        Environment(0, 1.0)
    with pytest.raises(ScenarioError):
        Environment(2, math.inf)
