"""Time the compiled kernels against their interpreted ``.py_func`` twins.

    python benchmarks/bench_kernels.py [--n 400] [--pairs 40] [--repeat 3]

Needs the numba backend (the default). Each kernel is warmed up once so
compile time is excluded, then both versions run on identical inputs and
their outputs are compared before timing is reported.
"""

import argparse
import math
import time

import numpy as np

from jointalign import _accel
from jointalign.core import Assignment, RecoveryParams
from jointalign.kernels import bfs_labels_kernel, pair_paths_kernel, path_sums_kernel
from jointalign.oracle import SimplePlusMinus, build_query_graph
from jointalign.pathweaver import pair_seed


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def same(a, b):
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--q", type=float, default=0.2)
    ap.add_argument("--pairs", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not _accel.USING_NUMBA:
        raise SystemExit("numba backend is disabled; unset JOINTALIGN_DISABLE_NUMBA")

    n, k = args.n, args.k
    m = min(n * (n - 1) // 2, math.ceil(25 * n * math.log(n)))
    truth = Assignment.random(n, k, [0, 1])
    g = build_query_graph(n, k, truth, SimplePlusMinus(args.q), m, 0)
    params = RecoveryParams.tuned(L=4, epsilon=0.25, b1=32, b=8, m=m)
    indptr, indices, answers, _ = g.csr
    pairs = [(i, 0) for i in range(1, args.pairs + 1)]

    def paths(fn):
        return lambda: [
            fn(indptr, indices, x, y, params.tree_depth, params.reach_depth, params.b1, params.b, pair_seed(0, x, y))
            for x, y in pairs
        ]

    fams = paths(pair_paths_kernel)()
    ptr = np.concatenate([[0], np.cumsum([f[0][-1] for f in fams])]).astype(np.int64)
    verts = np.concatenate([f[1] for f in fams]).astype(np.int64)
    # stitch the per-pair families into one flat path list
    flat_ptr = np.concatenate([f[0][:-1] + off for f, off in zip(fams, ptr[:-1])] + [[ptr[-1]]]).astype(np.int64)

    cases = {
        "pair_paths_kernel": (paths(pair_paths_kernel), paths(pair_paths_kernel.py_func)),
        "path_sums_kernel": tuple(
            (lambda f=f: f(indptr, indices, answers, flat_ptr, verts, k))
            for f in (path_sums_kernel, path_sums_kernel.py_func)
        ),
        "bfs_labels_kernel": tuple(
            (lambda f=f: f(indptr, indices, answers, 0, k, 7)) for f in (bfs_labels_kernel, bfs_labels_kernel.py_func)
        ),
    }
    print(f"n={n} k={k} m={m} pairs={len(pairs)} paths={flat_ptr.size - 1}")
    print(f"{'kernel':<20}{'numba (s)':>12}{'python (s)':>12}{'speedup':>10}  match")
    for name, (fast, slow) in cases.items():
        fast()
        tf, a = best_of(fast, args.repeat)
        ts, b = best_of(slow, args.repeat)
        print(f"{name:<20}{tf:>12.4f}{ts:>12.4f}{ts / tf:>9.1f}x  {same(a, b)}")


if __name__ == "__main__":
    main()
