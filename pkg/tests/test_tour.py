import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etsp_assign.core import ScenarioError
from etsp_assign.tour import (
    TargetTuple,
    canonical_order,
    double_tree_permutation,
    double_tree_tour,
    exact_tour,
    shared_tour,
    tour_length,
)

SQUARE = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]


def test_canonical_order_sorts():
    q = canonical_order([(5, 5), (1, 2), (1, 1)])
    assert q.points == ((1.0, 1.0), (1.0, 2.0), (5.0, 5.0))
    assert q.canonical
    assert canonical_order([(3,)]).points == ((3.0,),)


def test_canonical_order_rejects_duplicates():
    with pytest.raises(ScenarioError):
        canonical_order([(1, 2), (0, 0), (1, 2)])


def test_canonical_order_permutation_invariant():
    rnd = random.Random(3)
    pts = [(rnd.random(), rnd.random()) for _ in range(10)]
    ref = sorted(pts)
    for _ in range(20):
        rnd.shuffle(pts)
        assert list(canonical_order(pts).points) == ref


def test_exact_tour_examples():
    # three distinct 4-cycles: the perimeter (4) and two crossing ones (2 + 2*sqrt 2)
    assert exact_tour(SQUARE).length == pytest.approx(4.0)
    assert exact_tour([(0.0,), (7.0,)]).length == 14.0
    assert exact_tour([(2.0, 2.0)]).length == 0.0


def test_exact_tour_guard():
    with pytest.raises(ValueError):
        exact_tour([(float(i),) for i in range(13)])


def test_tour_length_examples():
    assert tour_length([(0.0,), (10.0,)]) == 20.0
    assert tour_length([(0, 0), (0, 1), (1, 1), (1, 0)]) == 4.0
    assert tour_length([(1.0, 1.0)]) == 0.0


def test_double_tree_square():
    q = shared_tour(SQUARE)
    assert tour_length(q) == pytest.approx(4.0)


def test_double_tree_triangle_is_perimeter():
    pts = [(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)]
    assert tour_length(shared_tour(pts)) == pytest.approx(12.0)


def test_double_tree_normalization():
    rnd = random.Random(5)
    for _ in range(30):
        pts = [(rnd.random(), rnd.random()) for _ in range(rnd.randint(3, 12))]
        canon = canonical_order(pts)
        perm = double_tree_permutation(canon)
        assert sorted(perm) == list(range(len(pts)))
        assert perm[0] == 0
        assert perm[1] < perm[-1]


def test_double_tree_follows_tie_rule_on_collinear_points():
    # all MST edges have length 1; the walk from the left end is the line itself
    q = shared_tour([(float(x), 0.0) for x in (3, 0, 2, 1, 4)])
    assert q.points == tuple((float(x), 0.0) for x in range(5))


@given(st.lists(st.tuples(st.floats(0, 100), st.floats(0, 100)), min_size=1, max_size=12, unique=True),
       st.randoms(use_true_random=False))
def test_shared_tour_independent_of_input_order(pts, rnd):
    shuffled = pts[:]
    rnd.shuffle(shuffled)
    assert repr(shared_tour(pts).points) == repr(shared_tour(shuffled).points)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 3), st.integers(1, 8), st.randoms(use_true_random=False))
def test_double_tree_within_twice_optimum(d, m, rnd):
    pts = list({tuple(rnd.uniform(0, 10) for _ in range(d)) for _ in range(m)})
    assert tour_length(shared_tour(pts)) <= 2 * exact_tour(pts).length + 1e-9


def test_exact_tour_agrees_with_full_enumeration():
    # independent oracle: every permutation, no mirror/rotation pruning
    rnd = random.Random(9)
    for _ in range(10):
        pts = [(rnd.random(), rnd.random()) for _ in range(6)]
        brute = min(tour_length([pts[i] for i in p]) for p in itertools.permutations(range(6)))
        assert exact_tour(pts).length == pytest.approx(brute)


def test_tour_length_scaling_bounded():
    # uniform points in [0, ell]^2: ETSP <= (sqrt(2m) + 1.75) ell, doubled for the heuristic
    rnd = random.Random(21)
    ell = 50.0
    ratios = []
    for m in (10, 25, 50, 100, 200):
        lengths = [
            tour_length(shared_tour([(rnd.uniform(0, ell), rnd.uniform(0, ell)) for _ in range(m)]))
            for _ in range(4)
        ]
        ratio = sum(lengths) / len(lengths) / (math.sqrt(m) * ell)
        assert ratio <= 2 * (math.sqrt(2) + 1.75 / math.sqrt(10))
        ratios.append(ratio)
    assert max(ratios) / min(ratios) < 2.0


def test_double_tree_keeps_canonical_flag():
    q = TargetTuple(((1.0,), (0.0,)), canonical=False)
    assert not double_tree_tour(q).canonical
    assert shared_tour([(1.0,), (0.0,)]).canonical


def test_noncanonical_tour_depends_on_input_order():
    rnd = random.Random(2)
    pts = [(rnd.random(), rnd.random()) for _ in range(9)]
    rev = pts[::-1]
    assert shared_tour(pts, canonicalize=False).points != shared_tour(rev, canonicalize=False).points
