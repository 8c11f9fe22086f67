import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jointalign import Assignment, InfeasibleParams, RecoveryParams, canonicalize, offset_error_rate
from jointalign.core import read_truth, write_truth


@pytest.mark.parametrize(
    "k, labels, expected",
    [
        (3, [1, 2, 0], [0, 1, 2]),
        (2, [0, 1, 1], [0, 1, 1]),
        (4, [3, 3, 0, 1], [0, 0, 1, 2]),
    ],
)
def test_canonicalize_examples(k, labels, expected):
    assert canonicalize(Assignment(k, labels)).labels.tolist() == expected


def test_assignment_rejects_bad_input():
    with pytest.raises(ValueError):
        Assignment(3, [0, 3])
    with pytest.raises(ValueError):
        Assignment(1, [0, 0])
    with pytest.raises(ValueError):
        Assignment(2, [0])


def test_assignment_is_immutable():
    a = Assignment(3, [0, 1, 2])
    with pytest.raises(ValueError):
        a.labels[0] = 1


def brute_force_error(est, truth):
    k, n = truth.k, truth.n
    return min(
        sum(est[i] != (truth[i] + c) % k for i in range(n)) / n for c in range(k)
    )


def test_offset_error_hand_example():
    truth = Assignment(2, [0, 0, 1, 1])
    est = Assignment(2, [1, 1, 1, 0])
    assert offset_error_rate(est, truth) == 0.25


def test_offset_error_shift_is_zero():
    truth = Assignment.random(40, 5, 0)
    for c in range(5):
        assert offset_error_rate(truth.shifted(c), truth) == 0.0


def test_offset_error_dimension_mismatch():
    with pytest.raises(ValueError):
        offset_error_rate(Assignment(3, [0, 1, 2]), Assignment(3, [0, 1]))
    with pytest.raises(ValueError):
        offset_error_rate(Assignment(3, [0, 1]), Assignment(2, [0, 1]))


labels_k3 = st.lists(st.integers(0, 2), min_size=5, max_size=5)


@given(labels_k3, labels_k3)
def test_offset_error_matches_enumeration_k3_n5(a, b):
    est, truth = Assignment(3, a), Assignment(3, b)
    assert offset_error_rate(est, truth) == pytest.approx(brute_force_error(est, truth), abs=0)


@st.composite
def assignment_pairs(draw):
    k = draw(st.integers(2, 6))
    n = draw(st.integers(2, 30))
    lab = st.lists(st.integers(0, k - 1), min_size=n, max_size=n)
    return Assignment(k, draw(lab)), Assignment(k, draw(lab)), draw(st.integers(0, k - 1))


@given(assignment_pairs())
def test_offset_error_properties(pair):
    a, b, c = pair
    e = offset_error_rate(a, b)
    assert offset_error_rate(a, a) == 0.0
    assert e == offset_error_rate(b, a)
    assert e == offset_error_rate(a.shifted(c), b) == offset_error_rate(a, b.shifted(c))
    assert e == offset_error_rate(canonicalize(a), b)
    assert canonicalize(canonicalize(a)) == canonicalize(a)
    assert (e == 0) == (canonicalize(a) == canonicalize(b))


def test_truth_file_roundtrip(tmp_path):
    a = Assignment.random(57, 4, 3)
    write_truth(tmp_path / "t.truth", a)
    text = (tmp_path / "t.truth").read_text().splitlines()
    assert text[0] == "4 57"
    assert read_truth(tmp_path / "t.truth") == a


def test_random_assignment_is_seeded():
    assert Assignment.random(100, 3, 7) == Assignment.random(100, 3, 7)
    assert Assignment.random(100, 3, 7) != Assignment.random(100, 3, 8)


def test_depth_split():
    p = RecoveryParams.tuned(L=4, epsilon=0.25, b1=32, b=8, m=100)
    assert (p.tree_depth, p.reach_depth) == (1, 3)
    assert p.max_path_length == 7 <= p.length_bound
    p = RecoveryParams.tuned(L=2, epsilon=0.1, b1=1, b=1, m=1)
    assert (p.tree_depth, p.reach_depth) == (0, 1)


@pytest.mark.parametrize("L, eps", list(itertools.product(range(1, 12), np.linspace(0.01, 0.49, 13))))
def test_max_path_length_within_bound(L, eps):
    p = RecoveryParams.tuned(L=L, epsilon=float(eps), b1=1, b=1, m=1)
    assert p.max_path_length <= p.length_bound


def test_tuned_validation():
    with pytest.raises(ValueError):
        RecoveryParams.tuned(L=4, epsilon=0.5, b1=1, b=1, m=1)
    with pytest.raises(ValueError):
        RecoveryParams.tuned(L=0, epsilon=0.2, b1=1, b=1, m=1)
    with pytest.raises(ValueError):
        RecoveryParams.tuned(L=3, epsilon=0.2, b1=1, b=1, m=1, anchor="both")


def test_paper_mode_formulas():
    import math

    n, delta = 1000, 0.9
    p = RecoveryParams.paper(n, delta)
    logn = math.log(n)
    L = round(logn / math.log(logn))
    assert p.L == L == 4
    assert p.epsilon == pytest.approx(1 / math.sqrt(math.log(logn)))
    assert p.b1 == math.ceil(4 * logn * delta**-L)
    assert p.b == math.ceil(4 * logn)
    assert p.m == math.ceil(20 * n * logn * delta**-L)
    assert p.mode == "paper"


def test_paper_mode_refuses_infeasible():
    with pytest.raises(InfeasibleParams, match="b1="):
        RecoveryParams.paper(400, 0.2)
