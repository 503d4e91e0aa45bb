"""Pure-loss (vacuum beamsplitter) channels acting on one or both beams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelSpec:
    """Power transmissions of the channels seen by mode 1 and mode 2."""

    t1: float = 1.0
    t2: float = 1.0

    def __post_init__(self):
        for name in ("t1", "t2"):
            t = getattr(self, name)
            if not (0.0 <= t <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {t!r}")

    @classmethod
    def single(cls, t, mode=1):
        """Loss on one beam only; the other beam is transmitted unchanged."""
        if mode == 1:
            return cls(t, 1.0)
        if mode == 2:
            return cls(1.0, t)
        raise ValueError(f"mode must be 1 or 2, got {mode!r}")

    @classmethod
    def symmetric(cls, t):
        return cls(t, t)


def _loss_map(t1, t2):
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    t1, t2 = np.broadcast_arrays(t1, t2)
    scale = np.sqrt(np.stack([t1, t1, t2, t2], axis=-1))
    noise = np.stack([1 - t1, 1 - t1, 1 - t2, 1 - t2], axis=-1)
    return scale, noise


def attenuate_many(V, t1, t2):
    """Vectorized :func:`attenuate` over arrays of transmissions.

    ``t1`` and ``t2`` broadcast against each other; the output has shape
    ``broadcast_shape + (4, 4)``.
    """
    scale, noise = _loss_map(t1, t2)
    V = np.asarray(V, dtype=float)
    out = V * scale[..., :, None] * scale[..., None, :]
    idx = np.arange(4)
    out[..., idx, idx] += noise
    return out


def attenuate(V, spec):
    """Send each beam through a pure-loss channel.

    ``V' = X V X + Y`` with ``X = diag(sqrt(t1), sqrt(t1), sqrt(t2), sqrt(t2))``
    and ``Y = diag(1-t1, 1-t1, 1-t2, 1-t2)``.
    """
    if not isinstance(spec, ChannelSpec):
        spec = ChannelSpec(*spec)
    return attenuate_many(V, spec.t1, spec.t2)


def duan_after_symmetric_loss(v, T):
    """Variance sum after equal loss ``1 - T`` on both beams: ``T*S + 2(1 - T)``."""
    if not (0.0 <= T <= 1.0):
        raise ValueError(f"T must lie in [0, 1], got {T!r}")
    return T * (v.p_minus + v.q_plus) + 2 * (1 - T)


def rebalance(V, spec):
    """Add loss to the better channel so both beams end at ``min(t1, t2)``.

    ``V`` is the state *after* the uneven channel ``spec``; the returned state
    equals the original one sent through a symmetric channel of transmission
    ``min(t1, t2)``.
    """
    if not isinstance(spec, ChannelSpec):
        spec = ChannelSpec(*spec)
    if spec.t1 == spec.t2:
        raise ValueError("channels are already balanced")
    t = min(spec.t1, spec.t2)
    extra = ChannelSpec(t / spec.t1 if spec.t1 > t else 1.0, t / spec.t2 if spec.t2 > t else 1.0)
    return attenuate(V, extra)

