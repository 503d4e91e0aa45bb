"""Entanglement sudden death under single-beam loss.

Two routes decide whether an entangled twin-beam state survives every finite
loss. :func:`classify_analytic` evaluates the sign of the W-quantity
combination ``W_prod*Wbar_sum + Wbar_prod*W_sum`` directly from the EPR
variances. :func:`classify_oracle` attenuates one beam over a grid of
transmissions and watches the PPT eigenvalue cross 1. The oracle arbitrates
whenever the analytic route is inconclusive.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import bisect

from .channels import attenuate_many
from .cv_core import (
    PHYSICAL_TOL,
    TwinBeamVariances,
    UnphysicalStateError,
    embed,
    require_physical,
)
from .criteria import ppt_nu_min

log = logging.getLogger(__name__)

DEFAULT_GRID = 512
#: Smallest transmission probed by the oracle grid.
T_MIN = 1e-6
BISECTION_XTOL = 1e-9


class Region(enum.IntEnum):
    """Region codes, also used verbatim in CSV/JSON output."""

    UNPHYSICAL = 0
    SEPARABLE = 1
    FRAGILE = 2
    ROBUST = 3

    @property
    def label(self):
        return {0: "unphysical", 1: "separable", 2: "fragile", 3: "robust"}[int(self)]


@dataclass(frozen=True)
class WQuantities:
    w_sum: float
    w_bar_sum: float
    w_prod: float
    w_bar_prod: float

    @property
    def esd_quantity(self):
        return self.w_prod * self.w_bar_sum + self.w_bar_prod * self.w_sum

    def as_dict(self):
        return {
            "w_sum": self.w_sum,
            "w_bar_sum": self.w_bar_sum,
            "w_prod": self.w_prod,
            "w_bar_prod": self.w_bar_prod,
            "esd_quantity": self.esd_quantity,
        }


@dataclass(frozen=True)
class Classification:
    """Outcome of an ESD classification.

    ``region`` is ``None`` only for an analytic result flagged
    ``indeterminate`` that has not been arbitrated yet.
    """

    region: Optional[Region]
    decided_by: str
    nu_min: Optional[float] = None
    w: Optional[WQuantities] = None
    critical_t: Optional[float] = None
    indeterminate: bool = False

    def as_dict(self):
        out = {
            "region": self.region.label if self.region is not None else None,
            "region_code": int(self.region) if self.region is not None else None,
            "decided_by": self.decided_by,
            "analytic_indeterminate": self.indeterminate,
            "nu_min": self.nu_min,
            "critical_t": self.critical_t,
        }
        if self.w is not None:
            out.update(self.w.as_dict())
        return out


@dataclass(frozen=True)
class SweepCurve:
    t: np.ndarray
    nu_min: np.ndarray
    mode: int
    n_points: int

    def crossings(self):
        """Number of sign changes of ``nu_min - 1`` along the curve."""
        return count_crossings(self.nu_min)

    def rows(self):
        return list(zip(self.t.tolist(), self.nu_min.tolist()))


def count_crossings(nu):
    entangled = np.asarray(nu) < 1
    return int(np.count_nonzero(entangled[1:] != entangled[:-1]))


def w_quantities(v):
    return WQuantities(
        w_sum=v.p_minus + v.q_plus - 2,
        w_bar_sum=v.p_plus + v.q_minus - 2,
        w_prod=v.p_minus * v.q_plus - 1,
        w_bar_prod=v.p_plus * v.q_minus - 1,
    )


def transmission_grid(n_points=DEFAULT_GRID, spacing="uniform", t_min=T_MIN):
    """Descending transmission grid starting at exactly 1.

    ``"uniform"`` gives ``1, 1 - 1/n, ..., 1/n``. ``"mixed"`` spends half the
    points on that uniform grid and the rest on a geometric grid reaching down
    to ``t_min``, where slowly-crossing states hide.
    """
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    if spacing == "uniform":
        return 1.0 - np.arange(n_points) / n_points
    if spacing == "mixed":
        n_lin = n_points // 2
        lin = 1.0 - np.arange(n_lin) / n_lin
        geo = np.geomspace(lin[-1], t_min, n_points - n_lin + 1)[1:]
        return np.concatenate([lin, geo])
    raise ValueError(f"unknown spacing {spacing!r}")


def nu_min_vs_transmission(V, t, mode=1):
    """PPT eigenvalue after loss ``1 - t`` on ``mode``, vectorized over ``t``.

    ``mode`` is 1 or 2 for a single lossy beam, or ``"both"`` for equal loss
    on both beams.
    """
    t = np.asarray(t, dtype=float)
    if mode == 1:
        Vt = attenuate_many(V, t, np.ones_like(t))
    elif mode == 2:
        Vt = attenuate_many(V, np.ones_like(t), t)
    elif mode == "both":
        Vt = attenuate_many(V, t, t)
    else:
        raise ValueError(f"mode must be 1, 2 or 'both', got {mode!r}")
    return ppt_nu_min(Vt)


def transmission_sweep(V, mode=1, n_points=DEFAULT_GRID, spacing="uniform"):
    t = transmission_grid(n_points, spacing)
    return SweepCurve(t=t, nu_min=np.asarray(nu_min_vs_transmission(V, t, mode)),
                      mode=mode, n_points=n_points)


def _bracket(t, nu):
    """First adjacent grid pair where the state stops being entangled."""
    outside = np.flatnonzero(nu >= 1)
    if outside.size == 0:
        return None
    k = outside[0]
    return t[k], t[k - 1]


def critical_transmission(V, mode=1, n_points=DEFAULT_GRID, xtol=BISECTION_XTOL):
    """Transmission at which single-beam loss destroys entanglement.

    Returns ``None`` when no sign change is found on the oracle grid (robust
    state).

    Raises:
        ValueError: if the state is not entangled before any loss.
    """
    nu_1 = float(ppt_nu_min(V))
    if nu_1 >= 1:
        raise ValueError(f"state is separable at T=1 (nu_min={nu_1:.6g})")
    t = transmission_grid(n_points, "mixed")
    bracket = _bracket(t, nu_min_vs_transmission(V, t, mode))
    if bracket is None:
        return None
    lo, hi = bracket

    def excess(x):
        return float(nu_min_vs_transmission(V, np.array([x]), mode)[0]) - 1.0

    if excess(lo) == 0.0:
        return float(lo)
    return float(bisect(excess, lo, hi, xtol=xtol))


def classify_oracle(V, mode=1, n_points=DEFAULT_GRID, tol=PHYSICAL_TOL):
    """Classify by attenuating one beam over a grid of transmissions.

    Separable if ``nu_min >= 1`` without loss, fragile if ``nu_min`` reaches
    1 at some transmission in ``(0, 1)``, robust otherwise.
    """
    require_physical(V, tol)
    t = transmission_grid(n_points, "mixed")
    nu = np.asarray(nu_min_vs_transmission(V, t, mode))
    nu_1 = float(nu[0])
    if nu_1 >= 1:
        return Classification(Region.SEPARABLE, "oracle", nu_min=nu_1)
    bracket = _bracket(t, nu)
    if bracket is None:
        return Classification(Region.ROBUST, "oracle", nu_min=nu_1)
    crossings = count_crossings(nu)
    if crossings > 1:
        log.warning("nu_min crosses 1 %d times on the sweep grid", crossings)
    return Classification(
        Region.FRAGILE,
        "oracle",
        nu_min=nu_1,
        critical_t=critical_transmission(V, mode, n_points),
    )


def classify_analytic(v, tol=PHYSICAL_TOL):
    """Classify a twin-beam state from its W quantities.

    Separable when neither ``W_prod`` nor ``Wbar_prod`` is negative. An
    entangled state is fragile when ``0 < esd_quantity < 1`` and robust when
    ``esd_quantity <= 0``. Entangled states with ``esd_quantity >= 1`` come
    back with ``region=None`` and ``indeterminate=True``; pass them to
    :func:`classify_oracle` (or use :func:`classify`).

    Raises:
        UnphysicalStateError: if ``v`` violates the uncertainty principle.
    """
    if not isinstance(v, TwinBeamVariances):
        v = TwinBeamVariances(*v)
    V = embed(v, tol)
    w = w_quantities(v)
    nu_1 = float(ppt_nu_min(V))
    if min(w.w_prod, w.w_bar_prod) >= 0:
        return Classification(Region.SEPARABLE, "analytic", nu_min=nu_1, w=w)
    e = w.esd_quantity
    if e <= 0:
        return Classification(Region.ROBUST, "analytic", nu_min=nu_1, w=w)
    if e < 1:
        return Classification(Region.FRAGILE, "analytic", nu_min=nu_1, w=w,
                              critical_t=critical_transmission(V, mode=1))
    return Classification(None, "analytic", nu_min=nu_1, w=w, indeterminate=True)


def classify(state, mode=1, n_points=DEFAULT_GRID, tol=PHYSICAL_TOL):
    """Analytic classification with oracle arbitration.

    ``state`` is either :class:`TwinBeamVariances` or a covariance matrix;
    matrices go straight to the oracle.
    """
    if not isinstance(state, TwinBeamVariances):
        return classify_oracle(state, mode, n_points, tol)
    result = classify_analytic(state, tol)
    if not result.indeterminate:
        return result
    oracle = classify_oracle(embed(state, tol), mode, n_points, tol)
    return Classification(oracle.region, "oracle", nu_min=result.nu_min, w=result.w,
                          critical_t=oracle.critical_t, indeterminate=True)


@dataclass
class RegionMap:
    """Classification of a ``p_minus x q_plus`` grid at fixed ``(p_plus, q_minus)``.

    Arrays are indexed ``[i, j]`` with ``i`` along ``p_minus`` and ``j`` along
    ``q_plus``.
    """

    p_minus: np.ndarray
    q_plus: np.ndarray
    fixed: tuple
    cells: list = field(repr=False)

    @property
    def codes(self):
        return np.array([[int(c.region) for c in row] for row in self.cells], dtype=int)

    @property
    def duan_violated(self):
        return self.p_minus[:, None] + self.q_plus[None, :] < 2

    def rows(self):
        duan = self.duan_violated
        for i, pm in enumerate(self.p_minus):
            for j, qp in enumerate(self.q_plus):
                yield float(pm), float(qp), self.cells[i][j], bool(duan[i, j])


def region_map(p_minus_range=(0.4, 0.8), q_plus_range=(0.4, 2.4), fixed=(2.1, 2.05),
               grid=(81, 81), mode=1, n_points=DEFAULT_GRID, tol=PHYSICAL_TOL):
    """Classify every cell of a ``p_minus x q_plus`` grid.

    ``fixed`` holds ``(p_plus, q_minus)``. Ranges are inclusive; a degenerate
    range ``(a, a)`` gives a single line.

    Raises:
        ValueError: if every cell is unphysical.
    """
    n, m = grid
    if n < 1 or m < 1:
        raise ValueError("grid dimensions must be positive")
    if min(*p_minus_range, *q_plus_range, *fixed) <= 0:
        raise ValueError("variances must be positive")
    p_plus, q_minus = fixed
    pm_axis = np.linspace(*p_minus_range, n)
    qp_axis = np.linspace(*q_plus_range, m)
    cells = []
    any_physical = False
    for pm in pm_axis:
        row = []
        for qp in qp_axis:
            v = TwinBeamVariances(float(pm), p_plus, float(qp), q_minus)
            if not v.is_physical(tol):
                row.append(Classification(Region.UNPHYSICAL, "analytic", w=w_quantities(v)))
                continue
            any_physical = True
            row.append(classify(v, mode, n_points, tol))
        cells.append(row)
    if not any_physical:
        raise UnphysicalStateError("every cell of the region map is unphysical")
    return RegionMap(pm_axis, qp_axis, (p_plus, q_minus), cells)
