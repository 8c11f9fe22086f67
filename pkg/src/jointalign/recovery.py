"""Plurality-vote recovery over almost edge-disjoint paths.

A path ``x = v0, v1, ..., vt = y`` votes for ``g(x) - g(y)`` with the sum of
the oriented answers ``f(v_{s} -> v_{s+1})``. Orientation matters: reading a
stored edge against its canonical direction negates the answer, which is the
only reading under which a noiseless path telescopes exactly. For k = 2 the
majority vote over sign products is the same rule (a tie reads "same").
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Assignment, RecoveryParams, canonicalize
from .kernels import bfs_labels_kernel, pair_paths_kernel, path_sums_kernel
from .oracle import QueryGraph
from .pathweaver import almost_edge_disjoint_paths, pair_seed


def path_difference(path, graph: QueryGraph) -> int:
    """Sum of oriented answers along ``path`` modulo k."""
    verts = np.asarray(path, dtype=np.int64)
    if verts.size < 2:
        raise ValueError("a path needs at least two vertices")
    indptr, indices, answers, _ = graph.csr
    ptr = np.array([0, verts.size], dtype=np.int64)
    s = int(path_sums_kernel(indptr, indices, answers, ptr, verts, graph.k)[0])
    if s < 0:
        bad = [(int(a), int(b)) for a, b in zip(verts, verts[1:]) if not graph.has_edge(a, b)]
        raise ValueError(f"path uses non-edges {bad[:3]}")
    return s


def path_sign_product(path, graph: QueryGraph) -> int:
    """k = 2 view: +1 ("same cluster") iff the path difference is 0 mod 2."""
    if graph.k != 2:
        raise ValueError(f"sign products need k = 2, got k = {graph.k}")
    return 1 if path_difference(path, graph) == 0 else -1


def plurality_vote(values, k=None):
    """``(winner, tie)`` with ties broken toward the smallest value."""
    values = np.asarray(values, dtype=np.int64)
    if values.size == 0:
        raise ValueError("cannot vote on an empty list")
    counts = np.bincount(values, minlength=k or 0)
    winner = int(np.argmax(counts))
    tie = int((counts == counts[winner]).sum()) > 1
    return winner, tie


@dataclass(frozen=True)
class PairEstimate:
    x: int
    y: int
    value: int | None
    votes: np.ndarray
    n_paths: int
    tie: bool

    @property
    def resolved(self):
        return self.n_paths > 0


def _pair_votes(x, y, graph: QueryGraph, params: RecoveryParams, seed):
    indptr, indices, answers, _ = graph.csr
    out = pair_paths_kernel(
        indptr, indices, int(x), int(y), params.tree_depth, params.reach_depth,
        int(params.b1), int(params.b), pair_seed(seed, x, y),
    )
    path_ptr, path_verts = out[0], out[1]
    sums = path_sums_kernel(indptr, indices, answers, path_ptr, path_verts, graph.k)
    return np.bincount(sums, minlength=graph.k)


def _estimate_from_votes(x, y, votes):
    n_paths = int(votes.sum())
    if n_paths == 0:
        return PairEstimate(int(x), int(y), None, votes, 0, False)
    winner = int(np.argmax(votes))
    tie = int((votes == votes[winner]).sum()) > 1
    return PairEstimate(int(x), int(y), winner, votes, n_paths, tie)


def estimate_pair(x, y, graph: QueryGraph, params: RecoveryParams, seed=0) -> PairEstimate:
    """Plurality estimate of ``g(x) - g(y) mod k``; unresolved when no path exists."""
    if x == y:
        raise ValueError("x and y must differ")
    return _estimate_from_votes(x, y, _pair_votes(x, y, graph, params, seed))


def estimate_pair_with_family(x, y, graph, params, seed=0):
    """Like :func:`estimate_pair` but also returns the path family."""
    fam = almost_edge_disjoint_paths(x, y, graph, params, seed)
    sums = [path_difference(p, graph) for p in fam.paths]
    votes = np.bincount(np.asarray(sums, dtype=np.int64), minlength=graph.k)
    return _estimate_from_votes(x, y, votes), fam


@dataclass
class RecoveryDiagnostics:
    mode: str
    pairs_evaluated: int = 0
    unresolved: list = field(default_factory=list)
    ties: list = field(default_factory=list)
    consistency_checked: int = 0
    consistency_violations: int = 0
    paths_per_pair: list = field(default_factory=list)

    @property
    def mean_paths(self):
        return float(np.mean(self.paths_per_pair)) if self.paths_per_pair else 0.0


def recover_assignment(graph: QueryGraph, params: RecoveryParams, seed=0):
    """Recover labels relative to item 0; returns ``(Assignment, diagnostics)``.

    Item ``i`` gets ``estimate(i, 0)``. In all-pairs mode every pair is
    estimated as well and pairwise disagreements with the anchor column are
    counted, but the assembly still uses the anchor column only.
    """
    n, k = graph.n, graph.k
    diag = RecoveryDiagnostics(mode=params.anchor)
    labels = np.zeros(n, dtype=np.int64)
    anchor_val = np.full(n, -1, dtype=np.int64)
    anchor_val[0] = 0
    for i in range(1, n):
        est = _estimate_from_votes(i, 0, _pair_votes(i, 0, graph, params, seed))
        diag.pairs_evaluated += 1
        diag.paths_per_pair.append(est.n_paths)
        if not est.resolved:
            diag.unresolved.append(i)
            continue
        if est.tie:
            diag.ties.append((i, 0))
        labels[i] = est.value
        anchor_val[i] = est.value
    if params.anchor == "all-pairs":
        for x in range(2, n):
            for y in range(1, x):
                est = _estimate_from_votes(x, y, _pair_votes(x, y, graph, params, seed))
                diag.pairs_evaluated += 1
                diag.paths_per_pair.append(est.n_paths)
                if not est.resolved:
                    continue
                if est.tie:
                    diag.ties.append((x, y))
                if anchor_val[x] < 0 or anchor_val[y] < 0:
                    continue
                diag.consistency_checked += 1
                if est.value != (anchor_val[x] - anchor_val[y]) % k:
                    diag.consistency_violations += 1
    return canonicalize(Assignment(k, labels)), diag


def spanning_tree_baseline(graph: QueryGraph, seed=0):
    """Labels read off a random BFS spanning tree rooted at item 0.

    Exact without noise, and every corrupted tree edge shifts its whole
    subtree. Returns ``(Assignment, unreached_items)``; unreached items get
    label 0.
    """
    indptr, indices, answers, _ = graph.csr
    labels, reached = bfs_labels_kernel(indptr, indices, answers, 0, graph.k, pair_seed(seed, 0, 0))
    return canonicalize(Assignment(graph.k, labels)), np.flatnonzero(~reached).tolist()


def write_recovery(path, a: Assignment, diag: RecoveryDiagnostics):
    lines = [f"{a.k} {a.n} {diag.mode}"]
    lines.extend(f"{i} {int(v)}" for i, v in enumerate(a.labels))
    lines.append("# diagnostics")
    lines.append("unresolved " + " ".join(str(v) for v in [len(diag.unresolved), *diag.unresolved]))
    lines.append(f"ties {len(diag.ties)}")
    lines.append(f"consistency_violations {diag.consistency_violations} of {diag.consistency_checked}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_recovery(path):
    """Parse a recovery file back into ``(Assignment, mode, diagnostics dict)``."""
    lines = Path(path).read_text().splitlines()
    k, n, mode = lines[0].split()
    k, n = int(k), int(n)
    labels = np.zeros(n, dtype=np.int64)
    for line in lines[1 : n + 1]:
        i, v = line.split()
        labels[int(i)] = int(v)
    info = {}
    for line in lines[n + 1 :]:
        if line.startswith("#") or not line.strip():
            continue
        key, *vals = line.split()
        info[key] = vals
    return Assignment(k, labels), mode, info
