"""Noisy pairwise-difference oracle and the random query graph.

Every stored answer lives on the canonical orientation ``u < v`` as
``y = g(u) - g(v) + noise (mod k)``. Reading the pair the other way round
returns ``-y mod k``; it is never stored or re-drawn.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .core import Assignment

PROB_TOL = 1e-12


class NoiseModel:
    """Distribution of the additive error ``eta`` in ``Z/kZ``."""

    def probs(self, k) -> np.ndarray:
        raise NotImplementedError

    def validate(self, k):
        self.probs(k)

    def sample(self, rng: np.random.Generator, k, size=None):
        """Draw errors by inverse-CDF lookup on uniforms."""
        cdf = np.cumsum(self.probs(k))
        cdf[-1] = 1.0
        u = rng.random(size)
        return np.searchsorted(cdf, u, side="right").astype(np.int64)

    def plurality_bias(self, k):
        """One-step advantage ``P(0) - max_{j != 0} P(j)``.

        For k = 2 under +-1 noise this is the bias ``1 - 2q``.
        """
        p = self.probs(k)
        return float(p[0] - p[1:].max())


@dataclass(frozen=True)
class SimplePlusMinus(NoiseModel):
    """Error +1 or -1 with probability q/2 each, 0 otherwise."""

    q: float

    def __post_init__(self):
        if not 0.0 <= self.q <= 0.5:
            raise ValueError(f"q must lie in [0, 1/2], got {self.q}")

    def probs(self, k):
        if k < 2:
            raise ValueError("k must be >= 2")
        p = np.zeros(k)
        p[0] = 1.0 - self.q
        # for k = 2, +1 and -1 coincide and the answer flips with probability q
        p[1 % k] += self.q / 2
        p[-1 % k] += self.q / 2
        return p


@dataclass(frozen=True)
class GeneralIID(NoiseModel):
    """Error ``j`` with probability ``q_vec[j]``."""

    q_vec: tuple

    def __post_init__(self):
        vec = tuple(float(v) for v in self.q_vec)
        object.__setattr__(self, "q_vec", vec)
        if any(v < 0 for v in vec):
            raise ValueError("q_vec entries must be non-negative")
        if abs(sum(vec) - 1.0) > PROB_TOL:
            raise ValueError(f"q_vec must sum to 1 (got {sum(vec)!r})")

    def probs(self, k):
        if len(self.q_vec) != k:
            raise ValueError(f"q_vec has length {len(self.q_vec)}, expected k={k}")
        return np.array(self.q_vec)


@dataclass(frozen=True)
class BiasedTowardZero(NoiseModel):
    """``P(0) = 1/k + delta``, every other error ``1/k - delta/(k-1)``."""

    delta: float

    def probs(self, k):
        if not 0.0 < self.delta <= 1.0 - 1.0 / k:
            raise ValueError(f"delta must lie in (0, 1 - 1/k] for k={k}, got {self.delta}")
        p = np.full(k, 1.0 / k - self.delta / (k - 1))
        p[0] = 1.0 / k + self.delta
        return p


def parse_noise(text) -> NoiseModel:
    """Parse ``pm:0.2``, ``iid:0.7,0.2,0.1`` or ``bias:0.3``; a bare float means ``pm``."""
    text = str(text).strip()
    kind, _, arg = text.partition(":")
    if not arg:
        return SimplePlusMinus(float(kind))
    kind = kind.lower()
    if kind in ("pm", "plusminus", "simple"):
        return SimplePlusMinus(float(arg))
    if kind in ("iid", "general"):
        return GeneralIID(tuple(float(v) for v in arg.split(",")))
    if kind in ("bias", "biased"):
        return BiasedTowardZero(float(arg))
    raise ValueError(f"unknown noise model {text!r}")


def format_noise(model: NoiseModel) -> str:
    if isinstance(model, SimplePlusMinus):
        return f"pm:{model.q!r}"
    if isinstance(model, GeneralIID):
        return "iid:" + ",".join(repr(v) for v in model.q_vec)
    if isinstance(model, BiasedTowardZero):
        return f"bias:{model.delta!r}"
    raise TypeError(model)


def sample_answer(u, v, truth: Assignment, model: NoiseModel, rng: np.random.Generator) -> int:
    """One fresh oracle answer ``(g(u) - g(v) + eta) mod k``."""
    if u == v:
        raise ValueError(f"self-query ({u}, {u}) is not allowed")
    k = truth.k
    eta = int(model.sample(rng, k))
    return (truth[u] - truth[v] + eta) % k


class Oracle:
    """Query interface that draws noise once per unordered pair.

    A repeated query (in either orientation) returns the stored answer,
    oriented as asked, without consuming a new draw.
    """

    def __init__(self, truth: Assignment, model: NoiseModel, rng):
        model.validate(truth.k)
        self.truth = truth
        self.model = model
        self.rng = np.random.default_rng(rng)
        self.draws = 0
        self._answers = {}

    def query(self, u, v):
        if u == v:
            raise ValueError(f"self-query ({u}, {u}) is not allowed")
        a, b = (u, v) if u < v else (v, u)
        y = self._answers.get((a, b))
        if y is None:
            y = sample_answer(a, b, self.truth, self.model, self.rng)
            self.draws += 1
            self._answers[(a, b)] = y
        return y if u < v else (-y) % self.truth.k

    def __len__(self):
        return len(self._answers)


def pair_from_index(idx, n):
    """Invert the row-major enumeration of pairs ``u < v``."""
    idx = np.asarray(idx, dtype=np.int64)
    rows = np.arange(n, dtype=np.int64)
    starts = rows * (2 * n - rows - 1) // 2
    u = np.searchsorted(starts, idx, side="right") - 1
    v = idx - starts[u] + u + 1
    return u, v


class QueryGraph:
    """Immutable set of queried pairs with their stored answers.

    Edges are kept sorted by ``(u, v)`` with ``u < v``; an edge's position in
    that order is its canonical index. ``noise`` holds the simulator's
    per-edge error draws when known (it is never used by recovery).
    """

    def __init__(self, n, k, u, v, y, seed=0, noise=None):
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if not (u.shape == v.shape == y.shape) or u.ndim != 1:
            raise ValueError("u, v, y must be 1-d arrays of equal length")
        if np.any(u == v):
            raise ValueError("self-loops are not allowed")
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        y = np.where(u < v, y, -y) % k
        if noise is not None:
            noise = np.asarray(noise, dtype=np.int64)
            noise = np.where(u < v, noise, -noise) % k
        order = np.lexsort((hi, lo))
        lo, hi, y = lo[order], hi[order], y[order]
        if noise is not None:
            noise = noise[order]
        if lo.size and (lo.min() < 0 or hi.max() >= n):
            raise ValueError("vertex id out of range")
        if lo.size > 1 and np.any((lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])):
            raise ValueError("duplicate pair: each pair may be queried only once")
        if y.size and (y.min() < 0 or y.max() >= k):
            raise ValueError("answers must lie in [0, k)")
        self.n = int(n)
        self.k = int(k)
        self.seed = int(seed)
        self.u, self.v, self.y = lo, hi, y
        self.noise = noise
        for arr in (self.u, self.v, self.y, self.noise):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def queries_used(self):
        return int(self.u.size)

    @property
    def m(self):
        return self.queries_used

    @cached_property
    def csr(self):
        """``(indptr, indices, answers, edge_ids)`` with oriented answers.

        ``answers[j]`` is the answer read in the direction ``row -> indices[j]``;
        neighbour lists are sorted ascending.
        """
        n, k = self.n, self.k
        src = np.concatenate([self.u, self.v])
        dst = np.concatenate([self.v, self.u])
        ans = np.concatenate([self.y, (-self.y) % k])
        eid = np.concatenate([np.arange(self.m), np.arange(self.m)])
        order = np.lexsort((dst, src))
        src, dst, ans, eid = src[order], dst[order], ans[order], eid[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        out = (indptr, dst.astype(np.int64), ans.astype(np.int64), eid.astype(np.int64))
        for arr in out:
            arr.setflags(write=False)
        return out

    def degrees(self):
        indptr = self.csr[0]
        return np.diff(indptr)

    def neighbors(self, u):
        indptr, indices = self.csr[:2]
        return indices[indptr[u] : indptr[u + 1]]

    def _slot(self, u, v):
        indptr, indices = self.csr[:2]
        lo, hi = indptr[u], indptr[u + 1]
        j = lo + int(np.searchsorted(indices[lo:hi], v))
        if j < hi and indices[j] == v:
            return j
        return -1

    def has_edge(self, u, v):
        return u != v and self._slot(u, v) >= 0

    def answer(self, u, v):
        """Stored answer read in orientation ``u -> v``."""
        j = self._slot(u, v)
        if u == v or j < 0:
            raise KeyError(f"({u}, {v}) was not queried")
        return int(self.csr[2][j])

    def edge_index(self, u, v):
        j = self._slot(u, v)
        if u == v or j < 0:
            raise KeyError(f"({u}, {v}) was not queried")
        return int(self.csr[3][j])

    def __eq__(self, other):
        if not isinstance(other, QueryGraph):
            return NotImplemented
        return (
            (self.n, self.k, self.seed) == (other.n, other.k, other.seed)
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.y, other.y)
        )

    def __repr__(self):
        return f"QueryGraph(n={self.n}, k={self.k}, m={self.m}, seed={self.seed})"

    @classmethod
    def from_oracle(cls, n, oracle: Oracle, seed=0):
        items = sorted(oracle._answers.items())
        u = [a for (a, _), _ in items]
        v = [b for (_, b), _ in items]
        y = [ans for _, ans in items]
        return cls(n, oracle.truth.k, u, v, y, seed=seed)


def build_query_graph(n, k, truth: Assignment, model: NoiseModel, m, seed) -> QueryGraph:
    """Query ``m`` distinct pairs chosen uniformly without replacement.

    Seed discipline: ``SeedSequence(seed)`` spawns two children, the first
    choosing pairs, the second drawing one uniform per edge in canonical
    order. The noise of edge ``i`` therefore depends only on ``(seed, i)``.
    """
    if truth.n != n or truth.k != k:
        raise ValueError("truth does not match (n, k)")
    model.validate(k)
    pairs = n * (n - 1) // 2
    if not 0 <= m <= pairs:
        raise ValueError(f"m={m} exceeds the {pairs} available pairs")
    pair_ss, noise_ss = np.random.SeedSequence(seed).spawn(2)
    pair_rng = np.random.default_rng(pair_ss)
    idx = np.sort(pair_rng.choice(pairs, size=m, replace=False))
    u, v = pair_from_index(idx, n)
    eta = model.sample(np.random.default_rng(noise_ss), k, size=m)
    y = (truth.labels[u] - truth.labels[v] + eta) % k
    return QueryGraph(n, k, u, v, y, seed=seed, noise=eta)


def min_degree_check(graph: QueryGraph, threshold):
    """Return ``(passed, failing_vertices)`` for ``degree < threshold``."""
    deg = graph.degrees()
    bad = np.flatnonzero(deg < threshold)
    return bad.size == 0, bad.tolist()


def gnp_graph(n, p, seed, k=2):
    """Noiseless binomial random graph on an all-zero assignment.

    Used for degree diagnostics where the answers are irrelevant.
    """
    rng = np.random.default_rng(seed)
    pairs = n * (n - 1) // 2
    count = rng.binomial(pairs, p)
    idx = np.sort(rng.choice(pairs, size=count, replace=False))
    u, v = pair_from_index(idx, n)
    return QueryGraph(n, k, u, v, np.zeros(count, dtype=np.int64), seed=seed)


def write_graph(path, graph: QueryGraph):
    lines = [f"{graph.n} {graph.k} {graph.m} {graph.seed}"]
    lines.extend(f"{a} {b} {c}" for a, b, c in zip(graph.u.tolist(), graph.v.tolist(), graph.y.tolist()))
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph(path) -> QueryGraph:
    with open(path) as fh:
        n, k, m, seed = (int(t) for t in fh.readline().split())
        data = np.loadtxt(fh, dtype=np.int64, ndmin=2)
    if data.size == 0:
        data = np.zeros((0, 3), dtype=np.int64)
    if data.shape[0] != m:
        raise ValueError(f"{path}: header says m={m}, found {data.shape[0]} edges")
    return QueryGraph(n, k, data[:, 0], data[:, 1], data[:, 2], seed=seed)
