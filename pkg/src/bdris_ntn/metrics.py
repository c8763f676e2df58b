"""Link gains, SINR, rates and interference at the primary users."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .config import SystemConfig


def default_feed(m: int) -> np.ndarray:
    """Uniform unit-norm feed illuminating all ``m`` elements."""
    return np.full(m, 1 / np.sqrt(m), dtype=complex)


@dataclass(frozen=True)
class LinkGains:
    """Per-user coefficients of the power subproblem.

    a: desired-link gain, b: noise plus LEO interference (W),
    c: gain towards the paired primary user.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        if not (self.a.shape == self.b.shape == self.c.shape):
            raise ValueError("a, b, c must have matching shapes")

    @property
    def num_users(self) -> int:
        return self.a.shape[0]


def _check_dims(row, phi, w):
    m = w.shape[0]
    if phi.shape != (m, m) or row.shape[-1] != m:
        raise ValueError(f"dimension mismatch: row {row.shape}, phi {phi.shape}, w {w.shape}")


def effective_gain(channel_row, phi, w) -> float:
    """``|h^T phi w|**2``."""
    channel_row, phi, w = np.asarray(channel_row), np.asarray(phi), np.asarray(w)
    _check_dims(channel_row, phi, w)
    return float(abs(channel_row @ (phi @ w)) ** 2)


def beam_gains(rows: np.ndarray, beam: np.ndarray) -> np.ndarray:
    """``|rows @ beam|**2`` for a precomputed beam ``phi @ w``."""
    return np.abs(rows @ beam) ** 2


def interference_floor(ch: ChannelSet, cfg: SystemConfig) -> np.ndarray:
    return cfg.noise_w + np.abs(ch.f) ** 2 * cfg.leo_power_per_put


def compute_gains(ch: ChannelSet, phi, w, cfg: SystemConfig) -> LinkGains:
    phi, w = np.asarray(phi), np.asarray(w)
    _check_dims(ch.h, phi, w)
    beam = phi @ w
    return LinkGains(a=beam_gains(ch.h, beam), b=interference_floor(ch, cfg),
                     c=beam_gains(ch.g, beam))


def sinr(a, b, p):
    return np.asarray(a) * np.asarray(p) / np.asarray(b)


def sum_rate(gains: LinkGains, p) -> float:
    return float(np.sum(np.log2(1 + sinr(gains.a, gains.b, p))))


def interference_at_put(c, p):
    return np.asarray(c) * np.asarray(p)
