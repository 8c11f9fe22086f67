"""Error walks on Z/kZ.

The accumulated noise along a path of ``t`` edges is a random walk on the
cycle whose one-step law is the noise distribution. Its transition matrix
is circulant, so the t-step law has a closed form through the discrete
Fourier basis; a repeated-squaring matrix power serves as the independent
check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oracle import NoiseModel, SimplePlusMinus

IMAG_TOL = 1e-10


def transition_matrix(k, model: NoiseModel) -> np.ndarray:
    """``T[i, j] = P(error = j - i mod k)``."""
    p = model.probs(k)
    i = np.arange(k)
    return p[(i[None, :] - i[:, None]) % k]


def eigenvalues(k, model: NoiseModel) -> np.ndarray:
    """``lambda_m = sum_d p_d omega^{-d m}`` with ``omega = exp(2 pi i / k)``.

    For the +-1 model this equals ``1 - q + q cos(2 pi m / k)``.
    """
    p = model.probs(k)
    d = np.arange(k)
    omega = np.exp(2j * np.pi / k)
    return (p[None, :] * omega ** (-np.outer(d, d))).sum(axis=1)


def t_step_closed_form(k, model: NoiseModel, t) -> np.ndarray:
    """``p_{0j}^t = (1/k) sum_m lambda_m^t omega^{j m}``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    lam = eigenvalues(k, model)
    d = np.arange(k)
    omega = np.exp(2j * np.pi / k)
    z = (omega ** np.outer(d, d)) @ (lam ** t) / k
    if np.max(np.abs(z.imag)) > IMAG_TOL:
        raise ArithmeticError(f"closed form left imaginary residue {np.max(np.abs(z.imag)):.3g}")
    return z.real


def t_step_matrix_power(k, model: NoiseModel, t) -> np.ndarray:
    """First row of ``T^t`` by repeated squaring in real arithmetic."""
    if t < 0:
        raise ValueError("t must be non-negative")
    base = transition_matrix(k, model)
    result = np.eye(k)
    while t:
        if t & 1:
            result = result @ base
        base = base @ base
        t >>= 1
    return result[0].copy()


def p00_simple(k, q, t):
    """Return-to-zero probability of the +-1 walk, summed term by term."""
    return 1.0 / k + sum((1 - q + q * math.cos(2 * math.pi * j / k)) ** t for j in range(1, k)) / k


def reference_gap_bound(k, q, t):
    """``2 (1 - cos(2 pi / k)) (1 - q + q cos(2 pi / k))^t``, a closed-form gap estimate.

    Reported for reference only: it is not a valid lower bound in general
    (k=3, q=1/2, t=1 gives 0.75 against an exact gap of 0.25).
    """
    c = math.cos(2 * math.pi / k)
    return 2.0 * (1.0 - c) * (1.0 - q + q * c) ** t


def plurality_gap(k, model: NoiseModel, t):
    """``(p00 - max_{j != 0} p0j, reference bound)`` after ``t`` steps."""
    if t < 1:
        raise ValueError("t must be >= 1")
    p = t_step_matrix_power(k, model, t)
    gap = float(p[0] - p[1:].max())
    if isinstance(model, SimplePlusMinus):
        bound = reference_gap_bound(k, model.q, t)
        if model.q < 0.5:
            assert gap > 0, f"non-positive gap {gap} for q={model.q} < 1/2"
    else:
        bound = float("nan")
    return gap, bound


@dataclass(frozen=True)
class WalkSpectrum:
    k: int
    model: NoiseModel

    @property
    def eigenvalues(self):
        return eigenvalues(self.k, self.model)

    @property
    def matrix(self):
        return transition_matrix(self.k, self.model)

    def t_step(self, t):
        return t_step_closed_form(self.k, self.model, t)

    def gap(self, t):
        return plurality_gap(self.k, self.model, t)


def walk_table(ks, qs, ts):
    """Rows ``(k, q, t, p00, gap, bound)`` for the +-1 model."""
    rows = []
    for k in ks:
        for q in qs:
            model = SimplePlusMinus(q)
            for t in ts:
                p = t_step_closed_form(k, model, t)
                gap, bound = plurality_gap(k, model, t) if t >= 1 else (float(p[0] - p[1:].max()), float("nan"))
                rows.append((k, q, t, float(p[0]), gap, bound))
    return rows
