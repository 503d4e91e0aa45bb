"""Figures for sweep curves and region maps.

Rendering is file-only (Agg backend); the CSV/JSON emitted alongside stays
the primary output.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

from .esd import Region  # noqa: E402

REGION_COLORS = {
    Region.UNPHYSICAL: "#ffffff",
    Region.SEPARABLE: "#08306b",
    Region.FRAGILE: "#9ecae1",
    Region.ROBUST: "#4292c6",
}


def _save(fig, path):
    # fixed metadata so repeated runs give identical PNG bytes
    fig.savefig(path, dpi=150, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)


def plot_sweeps(curves, labels, path):
    """One panel per sweep curve: PPT eigenvalue against transmission."""
    n = len(curves)
    ncols = min(n, 3)
    nrows = int(np.ceil(n / ncols))
    fig, axes = plt.subplots(nrows, ncols, figsize=(4 * ncols, 3.2 * nrows), squeeze=False)
    for ax, curve, label in zip(axes.flat, curves, labels):
        ax.plot(curve.t, curve.nu_min, "-", color="#08519c")
        ax.axhline(1.0, color="0.4", lw=0.8, ls="--")
        ax.set_xlim(0, 1)
        ax.set_xlabel("transmission T")
        ax.set_ylabel(r"$\tilde\nu_{\min}$")
        if label:
            ax.set_title(label, fontsize=10)
    for ax in list(axes.flat)[n:]:
        ax.set_visible(False)
    fig.tight_layout()
    _save(fig, path)


def plot_region_map(rmap, path, markers=()):
    """Region map over ``(p_minus, q_plus)`` with the variance-sum line dashed.

    ``markers`` is an optional sequence of ``(p_minus, q_plus)`` points.
    """
    codes = rmap.codes
    order = [Region.UNPHYSICAL, Region.SEPARABLE, Region.FRAGILE, Region.ROBUST]
    cmap = ListedColormap([REGION_COLORS[r] for r in order])
    pm, qp = rmap.p_minus, rmap.q_plus
    x0, x1 = (pm[0], pm[-1]) if pm[-1] > pm[0] else (pm[0] - 0.05, pm[0] + 0.05)
    y0, y1 = (qp[0], qp[-1]) if qp[-1] > qp[0] else (qp[0] - 0.05, qp[0] + 0.05)
    fig, ax = plt.subplots(figsize=(5, 4.5))
    ax.imshow(codes.T, origin="lower", cmap=cmap, vmin=-0.5, vmax=3.5, aspect="auto",
              extent=(x0, x1, y0, y1), interpolation="nearest")
    x = np.linspace(x0, x1, 200)
    ax.plot(x, 2 - x, "k--", lw=1)
    for p, q in markers:
        ax.plot(p, q, "o", color="#cb181d", ms=5)
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_xlabel(r"$\Delta^2 \hat p_-$")
    ax.set_ylabel(r"$\Delta^2 \hat q_+$")
    handles = [plt.Rectangle((0, 0), 1, 1, fc=REGION_COLORS[r], ec="0.5") for r in order[1:]]
    ax.legend(handles, [r.label for r in order[1:]], loc="upper right", fontsize=8)
    _save(fig, path)
