"""Two-mode covariance matrices, symplectic eigenvalues and twin-beam states.

All matrices use the quadrature ordering ``(p1, q1, p2, q2)`` (``p`` is the
amplitude quadrature, ``q`` the phase quadrature) and are normalized so that
the vacuum has unit variance. The EPR combinations carry a ``1/sqrt(2)``
factor, e.g. ``p_minus = Var((p1 - p2) / sqrt(2))``, so the vacuum gives 1 for
every combination.

Most functions also accept stacks of matrices with shape ``(..., 4, 4)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Default tolerance of the uncertainty-principle check for analytic states.
PHYSICAL_TOL = 1e-9
#: Tolerance used when deciding whether a matrix is a twin-beam state.
STRUCTURE_TOL = 1e-9

P1, Q1, P2, Q2 = range(4)

OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
OMEGA.flags.writeable = False


class UnphysicalStateError(ValueError):
    """Raised when a state violates the uncertainty principle.

    Attributes:
        nu: the offending (smallest) symplectic eigenvalue, or ``None`` when the
            matrix is not even positive definite.
    """

    def __init__(self, message, nu=None):
        super().__init__(message)
        self.nu = nu


class NotTwinBeamError(ValueError):
    """The matrix has mode asymmetry or p-q cross-correlations."""


@dataclass(frozen=True)
class TwinBeamVariances:
    """Variances of the four EPR combinations of a symmetric twin-beam state.

    ``p_minus`` and ``q_plus`` are the squeezed combinations of an EPR-type
    state; ``p_plus`` and ``q_minus`` are their conjugates.
    """

    p_minus: float
    p_plus: float
    q_plus: float
    q_minus: float

    def __post_init__(self):
        for name in ("p_minus", "p_plus", "q_plus", "q_minus"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    def as_tuple(self):
        return (self.p_minus, self.p_plus, self.q_plus, self.q_minus)

    def symplectic_products(self):
        """Return ``(p_minus*q_minus, p_plus*q_plus)``, the squared symplectic eigenvalues."""
        return self.p_minus * self.q_minus, self.p_plus * self.q_plus

    def is_physical(self, tol=PHYSICAL_TOL):
        return min(self.symplectic_products()) >= 1 - tol


def covariance_matrix(entries, tol=STRUCTURE_TOL):
    """Validate ``entries`` as a 4x4 covariance matrix and return a read-only copy.

    Asymmetry below ``tol`` is removed by averaging with the transpose, so the
    returned array is exactly symmetric.

    Raises:
        ValueError: wrong shape, non-finite entries or asymmetry above ``tol``.
    """
    V = np.array(entries, dtype=float)
    if V.shape != (4, 4):
        raise ValueError(f"covariance matrix must be 4x4, got shape {V.shape}")
    if not np.all(np.isfinite(V)):
        raise ValueError("covariance matrix has non-finite entries")
    if np.max(np.abs(V - V.T)) > tol:
        raise ValueError("covariance matrix is not symmetric")
    V = 0.5 * (V + V.T)
    V.flags.writeable = False
    return V


def vacuum():
    """Two-mode vacuum (identity matrix)."""
    return covariance_matrix(np.eye(4))


def two_mode_squeezed(r):
    """Pure two-mode squeezed vacuum with squeezing parameter ``r``.

    Squeezes ``p_minus`` and ``q_plus`` to ``exp(-2r)``.
    """
    s, a = np.exp(-2 * r), np.exp(2 * r)
    return embed(TwinBeamVariances(s, a, s, a))


def embed(v, tol=PHYSICAL_TOL):
    """Build the covariance matrix of the twin-beam state ``v``.

    Both modes share the diagonal blocks ``diag(alpha, beta)`` and are coupled
    by ``diag(gamma, delta)`` with::

        alpha = (p_plus + p_minus) / 2     gamma = (p_plus - p_minus) / 2
        beta  = (q_plus + q_minus) / 2     delta = (q_plus - q_minus) / 2

    Raises:
        UnphysicalStateError: if a symplectic eigenvalue is below ``1 - tol``.
    """
    if not isinstance(v, TwinBeamVariances):
        v = TwinBeamVariances(*v)
    nu_sq = min(v.symplectic_products())
    if nu_sq < 1 - tol:
        raise UnphysicalStateError(
            f"unphysical state: smallest symplectic eigenvalue {np.sqrt(nu_sq):.6g} < 1",
            nu=float(np.sqrt(nu_sq)),
        )
    alpha = (v.p_plus + v.p_minus) / 2
    gamma = (v.p_plus - v.p_minus) / 2
    beta = (v.q_plus + v.q_minus) / 2
    delta = (v.q_plus - v.q_minus) / 2
    V = np.array(
        [
            [alpha, 0.0, gamma, 0.0],
            [0.0, beta, 0.0, delta],
            [gamma, 0.0, alpha, 0.0],
            [0.0, delta, 0.0, beta],
        ]
    )
    V.flags.writeable = False
    return V


def extract(V, tol=STRUCTURE_TOL):
    """Inverse of :func:`embed` for mode-symmetric, cross-correlation-free states.

    Raises:
        NotTwinBeamError: if any p-q entry or the mode asymmetry exceeds ``tol``.
    """
    V = np.asarray(V, dtype=float)
    cross = max(abs(V[P1, Q1]), abs(V[P1, Q2]), abs(V[Q1, P2]), abs(V[P2, Q2]),
                abs(V[Q1, P1]), abs(V[Q2, P1]), abs(V[P2, Q1]), abs(V[Q2, P2]))
    if cross > tol:
        raise NotTwinBeamError(f"cross-correlation present (max |p-q| entry {cross:.3g})")
    asym = max(abs(V[P1, P1] - V[P2, P2]), abs(V[Q1, Q1] - V[Q2, Q2]),
               abs(V[P1, P2] - V[P2, P1]), abs(V[Q1, Q2] - V[Q2, Q1]))
    if asym > tol:
        raise NotTwinBeamError(f"state is not symmetric under mode exchange (deviation {asym:.3g})")
    alpha, beta = V[P1, P1], V[Q1, Q1]
    gamma, delta = V[P1, P2], V[Q1, Q2]
    return TwinBeamVariances(
        p_minus=float(alpha - gamma),
        p_plus=float(alpha + gamma),
        q_plus=float(beta + delta),
        q_minus=float(beta - delta),
    )


def _det2(M):
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


def _positive_definite(V):
    # Cholesky per matrix; eigvalsh would also do but is slower on stacks.
    try:
        np.linalg.cholesky(V)
    except np.linalg.LinAlgError:
        return False
    return True


def symplectic_invariants(V):
    """Return ``(Delta, det V)`` where ``Delta = det A + det B + 2 det C``."""
    V = np.asarray(V, dtype=float)
    A, B, C = V[..., 0:2, 0:2], V[..., 2:4, 2:4], V[..., 0:2, 2:4]
    return _det2(A) + _det2(B) + 2 * _det2(C), np.linalg.det(V)


def _symplectic_pair(V):
    delta, det = symplectic_invariants(V)
    # Delta^2 - 4 det V cancels to rounding noise when nu_1 ~ nu_2 (pure
    # states), costing sqrt(eps). N = (Omega V)^2 + Delta/2 has eigenvalues
    # +-(nu_big^2 - nu_small^2)/2, so tr(N^2) is the same discriminant with
    # the cancellation done entrywise, before squaring.
    M = OMEGA @ V
    N = M @ M + (delta / 2)[..., None, None] * np.eye(4)
    disc = np.einsum("...ij,...ji->...", N, N)
    if np.any(disc < -1e-12 * np.maximum(1.0, delta**2)):
        raise ValueError("negative discriminant: not a valid covariance matrix")
    root = np.sqrt(np.clip(disc, 0.0, None))
    big = (delta + root) / 2
    # det V = nu_small^2 * nu_big^2; avoids cancellation in (delta - root) / 2
    small = np.where(big > 0, det / np.where(big > 0, big, 1.0), 0.0)
    return np.sqrt(np.clip(small, 0.0, None)), np.sqrt(big)


def symplectic_eigenvalues(V, check=True):
    """Symplectic eigenvalues ``(nu_small, nu_big)`` of a two-mode covariance matrix.

    Uses the two-mode invariants ``nu^2 = (Delta -/+ sqrt(Delta^2 - 4 det V)) / 2``.
    The discriminant is evaluated as a trace of a squared matrix so that
    degenerate pairs (pure states) stay accurate to rounding, and the smaller
    root as ``det V / nu_big^2``, which keeps full relative precision for
    strongly squeezed states.

    Args:
        V: array of shape ``(4, 4)`` or ``(..., 4, 4)``.
        check: reject matrices that are not positive definite.

    Returns:
        tuple of floats for a single matrix, otherwise an array of shape ``(..., 2)``.

    Raises:
        ValueError: non-positive-definite input or negative discriminant.
    """
    V = np.asarray(V, dtype=float)
    if check and not _positive_definite(V):
        raise ValueError("covariance matrix is not positive definite")
    small, big = _symplectic_pair(V)
    if V.ndim == 2:
        return float(small), float(big)
    return np.stack([small, big], axis=-1)


def is_physical(V, tol=PHYSICAL_TOL):
    """True iff ``V`` is positive definite and both symplectic eigenvalues are >= ``1 - tol``."""
    V = np.asarray(V, dtype=float)
    if not _positive_definite(V):
        return False
    try:
        nu_small, _ = symplectic_eigenvalues(V, check=False)
    except ValueError:
        return False
    return nu_small >= 1 - tol


def require_physical(V, tol=PHYSICAL_TOL):
    """Raise :class:`UnphysicalStateError` unless ``is_physical(V, tol)``."""
    V = np.asarray(V, dtype=float)
    if not _positive_definite(V):
        raise UnphysicalStateError("unphysical state: covariance matrix is not positive definite")
    nu_small, _ = symplectic_eigenvalues(V, check=False)
    if nu_small < 1 - tol:
        raise UnphysicalStateError(
            f"unphysical state: smallest symplectic eigenvalue {nu_small:.6g} < 1", nu=nu_small
        )
    return V


def purity(V):
    """Purity ``1 / sqrt(det V)`` of a Gaussian state; 1 for pure states."""
    return float(1.0 / np.sqrt(np.linalg.det(np.asarray(V, dtype=float))))
