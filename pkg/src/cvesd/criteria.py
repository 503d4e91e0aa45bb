"""Entanglement tests: the EPR variance-sum (Duan) bound and the PPT test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cv_core import P1, P2, Q1, Q2, symplectic_eigenvalues

#: Half-width of the indeterminate band around nu_min = 1.
SEPARABILITY_TOL = 1e-9

DUAN_BOUND = 2.0


@dataclass(frozen=True)
class DuanReport:
    value: float

    @property
    def violated(self):
        return self.value < DUAN_BOUND


@dataclass(frozen=True)
class PptReport:
    """Smallest symplectic eigenvalue of the partially transposed state.

    ``status`` is ``"entangled"`` below ``1 - tol``, ``"separable"`` above
    ``1 + tol`` and ``"boundary"`` in between.
    """

    nu_min: float
    tol: float = SEPARABILITY_TOL

    @property
    def entangled(self):
        return self.nu_min < 1 - self.tol

    @property
    def status(self):
        if self.nu_min < 1 - self.tol:
            return "entangled"
        if self.nu_min > 1 + self.tol:
            return "separable"
        return "boundary"


def duan_value(V):
    """``Var(p_minus) + Var(q_plus)`` read off a general (possibly asymmetric) matrix."""
    V = np.asarray(V, dtype=float)
    p_minus = (V[..., P1, P1] + V[..., P2, P2] - 2 * V[..., P1, P2]) / 2
    q_plus = (V[..., Q1, Q1] + V[..., Q2, Q2] + 2 * V[..., Q1, Q2]) / 2
    return p_minus + q_plus


def duan_sum(V):
    return DuanReport(float(duan_value(V)))


def partial_transpose(V, mode=2):
    """Mirror the phase quadrature of ``mode`` (``q_k -> -q_k``).

    Works on stacks of matrices. The result need not be a physical state.
    """
    if mode not in (1, 2):
        raise ValueError(f"mode must be 1 or 2, got {mode!r}")
    k = Q1 if mode == 1 else Q2
    flip = np.ones(4)
    flip[k] = -1.0
    return np.asarray(V, dtype=float) * np.outer(flip, flip)


def ppt_nu_min(V, mode=2):
    """Smallest symplectic eigenvalue after partial transposition (array-valued)."""
    Vt = partial_transpose(V, mode)
    nu = symplectic_eigenvalues(Vt, check=False)
    return nu[0] if isinstance(nu, tuple) else nu[..., 0]


def ppt_min_eigenvalue(V, tol=SEPARABILITY_TOL, mode=2):
    return PptReport(float(ppt_nu_min(V, mode)), tol)
