"""Quick invariant and validator sweeps behind ``jointalign check``."""

from __future__ import annotations

import math

import numpy as np

from .core import Assignment, RecoveryParams
from .harness import claim1_exact, claim1_monte_carlo
from .markov import t_step_closed_form, t_step_matrix_power
from .oracle import GeneralIID, SimplePlusMinus, build_query_graph
from .pathweaver import almost_edge_disjoint_paths, validate_family
from .recovery import path_difference


def check_markov(tol=1e-10):
    worst = 0.0
    rng = np.random.default_rng(0)
    for k in range(2, 9):
        models = [SimplePlusMinus(q) for q in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)]
        for _ in range(20):
            v = rng.dirichlet(np.ones(k))
            v[-1] = 1.0 - v[:-1].sum()
            models.append(GeneralIID(tuple(v)))
        for model in models:
            for t in range(51):
                d = np.abs(t_step_closed_form(k, model, t) - t_step_matrix_power(k, model, t)).max()
                worst = max(worst, d)
    return worst <= tol, f"max |closed form - matrix power| = {worst:.2e}"


def check_parity(trials=100_000, seed=0):
    worst = 0.0
    for qi, q in enumerate((0.1, 0.25, 0.4)):
        for L in range(1, 11):
            p = claim1_exact(q, L)
            sd = math.sqrt(p * (1 - p) / trials)
            emp = claim1_monte_carlo(q, L, trials, seed=seed + 100 * qi + L)
            worst = max(worst, abs(emp - p) / sd)
    return worst <= 4.0, f"max deviation {worst:.2f} sd"


def check_families(count=200, seed=0):
    rng = np.random.default_rng(seed)
    failures = 0
    for i in range(count):
        n = int(rng.integers(20, 120))
        k = int(rng.integers(2, 6))
        density = float(rng.choice([0.05, 0.15, 0.5]))
        m = max(1, int(density * n * (n - 1) / 2))
        truth = Assignment.random(n, k, [seed, i])
        g = build_query_graph(n, k, truth, SimplePlusMinus(0.0), m, int(rng.integers(2**31)))
        params = RecoveryParams.tuned(
            L=int(rng.integers(1, 7)),
            epsilon=float(rng.uniform(0.05, 0.49)),
            b1=int(rng.integers(1, 20)),
            b=int(rng.integers(1, 6)),
            m=m,
        )
        x, y = (int(v) for v in rng.choice(n, 2, replace=False))
        fam = almost_edge_disjoint_paths(x, y, g, params, seed=i)
        report = validate_family(fam, g)
        diffs_ok = all(path_difference(p, g) == (truth[x] - truth[y]) % k for p in fam.paths)
        if not report.ok or not diffs_ok:
            failures += 1
    return failures == 0, f"{count - failures}/{count} families valid"


def run_checks(log=print):
    ok = True
    for name, fn in (("markov", check_markov), ("parity", check_parity), ("pathweaver", check_families)):
        passed, detail = fn()
        ok &= passed
        log(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    return ok
