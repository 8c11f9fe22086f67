import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jointalign import (
    Assignment,
    RecoveryParams,
    SimplePlusMinus,
    build_query_graph,
    estimate_pair,
    offset_error_rate,
    path_difference,
    path_sign_product,
    plurality_vote,
    recover_assignment,
    spanning_tree_baseline,
    t_step_matrix_power,
)
from jointalign.recovery import estimate_pair_with_family, read_recovery, write_recovery

from .conftest import graph_from_edges


def random_walk_path(g, rng, length):
    path = [int(rng.integers(g.n))]
    for _ in range(length):
        nbrs = g.neighbors(path[-1])
        path.append(int(rng.choice(nbrs)))
    return path


def test_path_difference_hand_example():
    g = graph_from_edges(3, 3, [(0, 1, 1), (1, 2, 2)])
    assert path_difference([0, 1, 2], g) == 0
    # traversing against the stored orientation negates each answer
    assert path_difference([2, 1, 0], g) == 0
    assert path_difference([1, 0], g) == 2


def test_path_difference_non_edge():
    g = graph_from_edges(3, 3, [(0, 1, 1), (1, 2, 2)])
    with pytest.raises(ValueError, match="non-edges"):
        path_difference([0, 2], g)


def test_noiseless_paths_telescope():
    truth = Assignment.random(80, 5, 0)
    g = build_query_graph(80, 5, truth, SimplePlusMinus(0.0), 800, 0)
    rng = np.random.default_rng(0)
    for _ in range(300):
        p = random_walk_path(g, rng, int(rng.integers(1, 9)))
        assert path_difference(p, g) == (truth[p[0]] - truth[p[-1]]) % 5


def test_telescoping_with_known_noise(noisy_graph):
    truth, g = noisy_graph
    rng = np.random.default_rng(1)
    for _ in range(300):
        p = random_walk_path(g, rng, int(rng.integers(1, 9)))
        noise = 0
        for a, b in zip(p, p[1:]):
            e = g.edge_index(a, b)
            noise += g.noise[e] if a < b else -g.noise[e]
        assert path_difference(p, g) == (truth[p[0]] - truth[p[-1]] + noise) % g.k
        assert path_difference(p[::-1], g) == (-path_difference(p, g)) % g.k


def test_k2_odd_corruptions_flip_the_answer():
    truth = Assignment.random(100, 2, 3)
    g = build_query_graph(100, 2, truth, SimplePlusMinus(0.3), 1200, 3)
    rng = np.random.default_rng(2)
    for _ in range(300):
        p = random_walk_path(g, rng, int(rng.integers(1, 9)))
        corrupted = sum(int(g.noise[g.edge_index(a, b)]) for a, b in zip(p, p[1:]))
        wrong = path_difference(p, g) != (truth[p[0]] - truth[p[-1]]) % 2
        assert wrong == (corrupted % 2 == 1)


def test_sign_product_examples():
    g = graph_from_edges(4, 2, [(0, 1, 0), (1, 2, 0), (2, 3, 1)])
    assert path_sign_product([0, 1, 2], g) == 1
    assert path_sign_product([0, 1, 2, 3], g) == -1
    g3 = graph_from_edges(3, 3, [(0, 1, 0), (1, 2, 0)])
    with pytest.raises(ValueError):
        path_sign_product([0, 1], g3)


def test_sign_product_matches_difference():
    truth = Assignment.random(60, 2, 5)
    g = build_query_graph(60, 2, truth, SimplePlusMinus(0.4), 600, 5)
    rng = np.random.default_rng(5)
    for _ in range(1000):
        p = random_walk_path(g, rng, int(rng.integers(1, 12)))
        assert (path_sign_product(p, g) == 1) == (path_difference(p, g) == 0)


def test_plurality_examples():
    assert plurality_vote([0, 0, 1, 2]) == (0, False)
    assert plurality_vote([1, 2, 1, 2]) == (1, True)
    with pytest.raises(ValueError):
        plurality_vote([])


@given(st.lists(st.integers(0, 6), min_size=1, max_size=40))
def test_plurality_monotone(values):
    winner, _ = plurality_vote(values)
    counts = np.bincount(values)
    assert counts[winner] == counts.max()
    assert plurality_vote(values + [winner])[0] == winner


def test_plurality_on_walk_distribution():
    k, q, t, trials = 3, 0.3, 5, 10**5
    model = SimplePlusMinus(q)
    rng = np.random.default_rng(7)
    sums = model.sample(rng, k, size=(trials, t)).sum(axis=1) % k
    winner, tie = plurality_vote(sums, k)
    p00 = t_step_matrix_power(k, model, t)[0]
    sd = math.sqrt(p00 * (1 - p00) / trials)
    assert winner == 0 and not tie
    assert abs(np.mean(sums == 0) - p00) <= 4 * sd


def test_estimate_pair_noiseless():
    truth = Assignment.random(120, 4, 1)
    g = build_query_graph(120, 4, truth, SimplePlusMinus(0.0), 2000, 1)
    p = RecoveryParams.tuned(L=4, epsilon=0.25, b1=10, b=4, m=2000)
    est = estimate_pair(5, 9, g, p, seed=3)
    assert est.value == (truth[5] - truth[9]) % 4
    assert est.votes[est.value] == est.n_paths > 0 and not est.tie
    est2, fam = estimate_pair_with_family(5, 9, g, p, seed=3)
    assert est2.value == est.value and np.array_equal(est2.votes, est.votes)
    assert fam.N == est.n_paths


def test_estimate_pair_disconnected():
    g = graph_from_edges(4, 3, [(0, 1, 1), (2, 3, 2)])
    p = RecoveryParams.tuned(L=2, epsilon=0.25, b1=2, b=2, m=2)
    est = estimate_pair(0, 3, g, p)
    assert not est.resolved and est.value is None and est.n_paths == 0


def test_estimate_pair_accuracy_dense():
    # n=300, k=3, q=0.2, 90% of all pairs queried, L=4, eps=0.25, b1=64, b=8
    n, k = 300, 3
    truth = Assignment.random(n, k, 21)
    m = int(0.9 * n * (n - 1) / 2)
    g = build_query_graph(n, k, truth, SimplePlusMinus(0.2), m, 21)
    p = RecoveryParams.tuned(L=4, epsilon=0.25, b1=64, b=8, m=m)
    rng = np.random.default_rng(21)
    correct = 0
    for _ in range(1000):
        x, y = (int(v) for v in rng.choice(n, 2, replace=False))
        correct += estimate_pair(x, y, g, p, seed=21).value == (truth[x] - truth[y]) % k
    assert correct >= 990


@pytest.mark.parametrize("anchor", ["single", "all-pairs"])
def test_noiseless_recovery_exact(anchor):
    truth = Assignment.random(60, 3, 2)
    g = build_query_graph(60, 3, truth, SimplePlusMinus(0.0), 600, 2)
    p = RecoveryParams.tuned(L=4, epsilon=0.25, b1=8, b=4, m=600, anchor=anchor)
    est, diag = recover_assignment(g, p, seed=2)
    assert offset_error_rate(est, truth) == 0.0
    assert est[0] == 0
    assert diag.unresolved == []
    if anchor == "all-pairs":
        assert diag.consistency_violations == 0
        assert diag.consistency_checked == 59 * 58 // 2


def test_anchor_modes_agree():
    truth = Assignment.random(50, 3, 4)
    g = build_query_graph(50, 3, truth, SimplePlusMinus(0.3), 500, 4)
    p = RecoveryParams.tuned(L=4, epsilon=0.25, b1=6, b=3, m=500)
    a, da = recover_assignment(g, p, seed=4)
    b, db = recover_assignment(g, p.with_anchor("all-pairs"), seed=4)
    assert a == b
    assert db.pairs_evaluated == 50 * 49 // 2
    assert db.consistency_violations > 0


def test_unresolved_items_flagged():
    g = graph_from_edges(5, 3, [(0, 1, 1), (1, 2, 1), (3, 4, 2)])
    p = RecoveryParams.tuned(L=2, epsilon=0.1, b1=2, b=2, m=3)
    est, diag = recover_assignment(g, p)
    assert diag.unresolved == [3, 4]
    assert est.labels.tolist() == [0, 2, 1, 0, 0]


def _exact_runs(n, k, q, params, seeds):
    exact = 0
    for s in seeds:
        truth = Assignment.random(n, k, [s, 1])
        g = build_query_graph(n, k, truth, SimplePlusMinus(q), params.m, s)
        est, _ = recover_assignment(g, params, s)
        exact += offset_error_rate(est, truth) == 0.0
    return exact


@pytest.mark.xfail(strict=True, reason="k=2, q=0.25 at n=400 leaves ~4% per-item error even with b1=199")
def test_k2_quarter_noise_exact_recovery_n400():
    # pinned: L=4, eps=0.25, b1=199 (the n/2 vertex budget), b=8, all pairs queried
    n = 400
    p = RecoveryParams.tuned(L=4, epsilon=0.25, b1=199, b=8, m=n * (n - 1) // 2)
    assert _exact_runs(n, 2, 0.25, p, range(10)) >= 9


def test_k2_exact_recovery_n400_q01():
    n = 400
    m = min(n * (n - 1) // 2, math.ceil(25 * n * math.log(n)))
    p = RecoveryParams.tuned(L=4, epsilon=0.25, b1=64, b=8, m=m)
    assert _exact_runs(n, 2, 0.1, p, range(10)) >= 9


def test_k3_exact_recovery_n400_b1_128():
    n = 400
    m = min(n * (n - 1) // 2, math.ceil(25 * n * math.log(n)))
    p = RecoveryParams.tuned(L=4, epsilon=0.25, b1=128, b=8, m=m)
    assert _exact_runs(n, 3, 0.2, p, range(20)) >= 18


def test_baseline_noiseless_exact():
    truth = Assignment.random(200, 5, 8)
    g = build_query_graph(200, 5, truth, SimplePlusMinus(0.0), 1500, 8)
    est, unreached = spanning_tree_baseline(g, seed=8)
    assert offset_error_rate(est, truth) == 0.0 and unreached == []


def test_baseline_star_fault_localised():
    n = 10
    edges = [(0, i, 0) for i in range(1, n)]
    edges[2] = (0, 3, 1)
    g = graph_from_edges(n, 3, edges)
    est, _ = spanning_tree_baseline(g)
    truth = Assignment(3, [0] * n)
    assert np.flatnonzero(est.labels != truth.labels).tolist() == [3]


def test_baseline_flags_unreached():
    g = graph_from_edges(4, 2, [(0, 1, 1)])
    est, unreached = spanning_tree_baseline(g)
    assert unreached == [2, 3] and est.labels.tolist() == [0, 1, 0, 0]


def test_voting_beats_baseline():
    n, k, q = 400, 3, 0.2
    m = min(n * (n - 1) // 2, math.ceil(25 * n * math.log(n)))
    p = RecoveryParams.tuned(L=4, epsilon=0.25, b1=32, b=8, m=m)
    ours, base = [], []
    for s in range(10):
        truth = Assignment.random(n, k, [s, 1])
        g = build_query_graph(n, k, truth, SimplePlusMinus(q), m, s)
        ours.append(offset_error_rate(recover_assignment(g, p, s)[0], truth))
        base.append(offset_error_rate(spanning_tree_baseline(g, s)[0], truth))
    assert np.mean(ours) < np.mean(base)


def test_recovery_file_roundtrip(tmp_path):
    truth = Assignment.random(40, 3, 1)
    g = build_query_graph(40, 3, truth, SimplePlusMinus(0.2), 300, 1)
    p = RecoveryParams.tuned(L=4, epsilon=0.25, b1=5, b=3, m=300)
    est, diag = recover_assignment(g, p, 1)
    write_recovery(tmp_path / "r.txt", est, diag)
    lines = (tmp_path / "r.txt").read_text().splitlines()
    assert lines[0] == "3 40 single"
    back, mode, info = read_recovery(tmp_path / "r.txt")
    assert back == est and mode == "single"
    assert int(info["unresolved"][0]) == len(diag.unresolved)
    assert int(info["ties"][0]) == len(diag.ties)
