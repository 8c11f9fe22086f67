"""Shared domain types: assignments, offset-aware metrics, recovery parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np


class InfeasibleParams(ValueError):
    """Raised when paper-mode constants cannot be realised on the given n."""


def _frozen(arr):
    arr = np.array(arr, dtype=np.int64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Assignment:
    """Labels ``g(i)`` in ``[0, k)`` for items ``0..n-1``."""

    k: int
    labels: np.ndarray

    def __post_init__(self):
        labels = _frozen(self.labels)
        object.__setattr__(self, "labels", labels)
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if labels.ndim != 1 or labels.size < 2:
            raise ValueError("an assignment needs at least 2 items")
        if labels.min() < 0 or labels.max() >= self.k:
            raise ValueError(f"labels must lie in [0, {self.k})")

    @property
    def n(self):
        return int(self.labels.size)

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        return int(self.labels[i])

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash((self.k, self.labels.tobytes()))

    def __repr__(self):
        return f"Assignment(k={self.k}, n={self.n}, labels={self.labels.tolist()[:10]}{'...' if self.n > 10 else ''})"

    def shifted(self, c):
        return Assignment(self.k, (self.labels + c) % self.k)

    @classmethod
    def random(cls, n, k, seed):
        rng = np.random.default_rng(seed)
        return cls(k, rng.integers(0, k, size=n))


def canonicalize(a: Assignment) -> Assignment:
    """Shift labels so that item 0 carries label 0."""
    return a.shifted(-a[0])


def offset_error_rate(estimate: Assignment, truth: Assignment) -> float:
    """Fraction of mislabelled items under the best global offset."""
    if estimate.n != truth.n or estimate.k != truth.k:
        raise ValueError(
            f"dimension mismatch: estimate (n={estimate.n}, k={estimate.k}) "
            f"vs truth (n={truth.n}, k={truth.k})"
        )
    k = truth.k
    diff = (estimate.labels - truth.labels) % k
    # the best offset is the most common difference
    agree = np.bincount(diff, minlength=k).max()
    return float(truth.n - agree) / truth.n


def write_truth(path, a: Assignment):
    lines = [f"{a.k} {a.n}"]
    lines.extend(str(int(v)) for v in a.labels)
    Path(path).write_text("\n".join(lines) + "\n")


def read_truth(path) -> Assignment:
    lines = Path(path).read_text().split("\n")
    k, n = (int(t) for t in lines[0].split())
    labels = [int(t) for t in lines[1 : n + 1]]
    if len(labels) != n:
        raise ValueError(f"{path}: header says n={n}, found {len(labels)} labels")
    return Assignment(k, labels)


ANCHOR_MODES = ("single", "all-pairs")
PARAM_MODES = ("paper", "tuned")


def _round_half_up(x):
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class RecoveryParams:
    """Path-construction and query-budget parameters.

    ``L`` is the path length scale and ``epsilon`` splits it into the depth of
    the twin root trees (``epsilon * L``) and the total reach of a leaf
    subtree measured from the root (``(1/2 + epsilon) * L``). ``b1`` caps the
    first level of the root trees, ``b`` every other level, ``m`` is the
    number of oracle queries.
    """

    L: int
    epsilon: float
    b1: int
    b: int
    m: int
    anchor: str = "single"
    mode: str = "tuned"
    delta: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be a positive integer")
        # 1/sqrt(log log n) exceeds 1/2 for every n below ~5e23
        eps_hi = 0.5 if self.mode == "tuned" else 1.0
        if not 0.0 < self.epsilon < eps_hi:
            raise ValueError(f"epsilon must lie in (0, {eps_hi}) in {self.mode} mode")
        if self.b1 < 1 or self.b < 1 or self.m < 1:
            raise ValueError("b1, b and m must be positive")
        if self.anchor not in ANCHOR_MODES:
            raise ValueError(f"anchor must be one of {ANCHOR_MODES}")
        if self.mode not in PARAM_MODES:
            raise ValueError(f"mode must be one of {PARAM_MODES}")

    @property
    def tree_depth(self):
        """Depth of the twin root trees; 0 means the leaves are x and y."""
        return _round_half_up(self.epsilon * self.L)

    @property
    def reach_depth(self):
        """Depth from the root reached by the leaf subtrees."""
        return max(self.tree_depth, _round_half_up((0.5 + self.epsilon) * self.L))

    @property
    def max_path_length(self):
        return 2 * self.reach_depth + 1

    @property
    def length_bound(self):
        return (1.0 + 2.0 * self.epsilon) * self.L + 2.0

    def with_anchor(self, anchor):
        return replace(self, anchor=anchor)

    @classmethod
    def tuned(cls, L, epsilon, b1, b, m, anchor="single"):
        return cls(L=L, epsilon=epsilon, b1=b1, b=b, m=m, anchor=anchor, mode="tuned")

    @classmethod
    def paper(cls, n, delta, anchor="single"):
        """Parameters from the asymptotic formulas, refusing infeasible ones.

        L = log n / log log n, epsilon = 1/sqrt(log log n), first-level
        branching 4 log n / delta^L, other levels 4 log n, and
        20 n log n / delta^L queries.
        """
        if n < 16:
            raise InfeasibleParams(f"paper mode needs log log n > 1, got n={n}")
        if not 0.0 < delta <= 1.0:
            raise InfeasibleParams(f"bias delta must lie in (0, 1], got {delta}")
        logn = math.log(n)
        loglogn = math.log(logn)
        L = max(1, _round_half_up(logn / loglogn))
        eps = 1.0 / math.sqrt(loglogn)
        amp = delta ** (-L)
        b1 = math.ceil(4.0 * logn * amp)
        b = math.ceil(4.0 * logn)
        m = math.ceil(20.0 * n * logn * amp)
        if b1 > n - 1:
            raise InfeasibleParams(
                f"paper-mode first-level branching b1={b1} exceeds the "
                f"feasibility limit n-1={n - 1} (L={L}, delta={delta:.4g})"
            )
        pairs = n * (n - 1) // 2
        if m > pairs:
            raise InfeasibleParams(
                f"paper-mode query budget m={m} exceeds the {pairs} available pairs"
            )
        return cls(L=L, epsilon=eps, b1=b1, b=b, m=m, anchor=anchor, mode="paper", delta=delta)
