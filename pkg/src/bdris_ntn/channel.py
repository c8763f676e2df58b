"""Rician block-fading channels for the HAPS -> SUT, HAPS -> PUT and LEO -> SUT links."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SPEED_OF_LIGHT, SystemConfig


@dataclass(frozen=True)
class GeometryDraw:
    """Per-user link geometry; every field is an array with one entry per user."""

    distance: np.ndarray
    elevation: np.ndarray
    azimuth: np.ndarray
    doppler: np.ndarray


@dataclass(frozen=True)
class TrialGeometry:
    sut: GeometryDraw
    put: GeometryDraw
    leo: GeometryDraw


@dataclass(frozen=True)
class ChannelSet:
    """One fading block.

    ``h[k]`` is the HAPS -> SUT k row, ``g[k]`` the HAPS -> PUT row paired with
    SUT k, and ``f[k]`` the scalar LEO -> SUT k coefficient.
    """

    h: np.ndarray
    g: np.ndarray
    f: np.ndarray
    block_index: int = 0

    @property
    def num_users(self) -> int:
        return self.h.shape[0]

    @property
    def num_elements(self) -> int:
        return self.h.shape[1]


def upa_steering(theta, phi, mx: int, my: int, delta: float) -> np.ndarray:
    """Uniform planar array response ``a_x kron a_y`` for one direction."""
    if mx < 1 or my < 1:
        raise ValueError("array dimensions must be at least 1")
    u = delta * np.sin(theta)
    ax = np.exp(-1j * u * np.cos(phi) * np.arange(mx))
    ay = np.exp(-1j * u * np.sin(phi) * np.arange(my))
    return np.kron(ax, ay)


def doppler_shift(v: float, f_c: float, theta) -> float:
    return v * f_c * np.cos(theta) / SPEED_OF_LIGHT


def los_component(theta, phi, f_d, t, t_b, mx, my, delta) -> np.ndarray:
    return upa_steering(theta, phi, mx, my, delta) * np.exp(2j * np.pi * f_d * t * t_b)


def reference_gain(f_c: float) -> float:
    """Free-space gain at 1 m, ``(c / (4 pi f_c))**2``."""
    return (SPEED_OF_LIGHT / (4 * np.pi * f_c)) ** 2


def path_gain(d, beta: float, f_c: float):
    """Physical large-scale gain ``h_ref / d**beta`` with the 1 m reference folded in."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 1.0):
        raise ValueError("distance below the 1 m reference distance")
    return reference_gain(f_c) / d**beta


def normalized_path_gain(d, beta: float, reference_distance: float):
    """Unit gain at ``reference_distance``, decaying as ``(d / d_ref)**-beta``."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    return (d / reference_distance) ** -beta


def large_scale_gain(d, cfg: SystemConfig):
    if cfg.pathloss_model == "physical":
        return path_gain(d, cfg.pathloss_exponent, cfg.carrier_hz)
    return normalized_path_gain(d, cfg.pathloss_exponent, cfg.reference_distance_m)


def complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    """Circularly-symmetric CN(0, 1) samples."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)


def rician_vector(los: np.ndarray, gain: float, rician_factor: float,
                  rng: np.random.Generator) -> np.ndarray:
    """Scale ``sqrt(K/(K+1)) * los + sqrt(1/(K+1)) * nlos`` by ``sqrt(gain)``.

    ``los`` may be a vector or a scalar; the scattered part has the same
    shape and is drawn fresh from ``rng``.
    """
    if rician_factor < 0:
        raise ValueError("rician_factor must be non-negative")
    los = np.asarray(los, dtype=complex)
    k = rician_factor
    nlos = complex_normal(rng, los.shape)
    return np.sqrt(gain) * (np.sqrt(k / (k + 1)) * los + np.sqrt(1 / (k + 1)) * nlos)


def _draw(rng, n, distance_range, speed, f_c) -> GeometryDraw:
    distance = rng.uniform(*distance_range, size=n)
    elevation = rng.uniform(0.0, np.pi / 3, size=n)
    azimuth = rng.uniform(0.0, 2 * np.pi, size=n)
    return GeometryDraw(distance, elevation, azimuth, doppler_shift(speed, f_c, elevation))


def draw_geometry(cfg: SystemConfig, rng: np.random.Generator) -> TrialGeometry:
    """User positions for one trial; held fixed across fading blocks."""
    k = cfg.num_users
    return TrialGeometry(
        sut=_draw(rng, k, cfg.sut_distance_range, cfg.haps_speed, cfg.carrier_hz),
        put=_draw(rng, k, cfg.put_distance_range, cfg.haps_speed, cfg.carrier_hz),
        leo=_draw(rng, k, cfg.leo_distance_range, cfg.leo_speed, cfg.carrier_hz),
    )


def generate_channel_set(cfg: SystemConfig, rng: np.random.Generator, t: int | None = None,
                         geometry: TrialGeometry | None = None) -> ChannelSet:
    """Draw one block of channels.

    Without ``geometry`` the user geometry is drawn from ``rng`` first, so a
    single generator reproduces the whole block. Pass a fixed geometry to
    advance the same users through several blocks.
    """
    t = cfg.block_index if t is None else t
    if geometry is None:
        geometry = draw_geometry(cfg, rng)
    mx, my = cfg.grid
    delta = cfg.phase_step
    kr = cfg.rician_factor

    def array_rows(geo: GeometryDraw) -> np.ndarray:
        gains = large_scale_gain(geo.distance, cfg)
        rows = []
        for i in range(cfg.num_users):
            los = los_component(geo.elevation[i], geo.azimuth[i], geo.doppler[i], t,
                                cfg.block_duration, mx, my, delta)
            rows.append(rician_vector(los, gains[i], kr, rng))
        return np.array(rows)

    h = array_rows(geometry.sut)
    g = array_rows(geometry.put)
    leo = geometry.leo
    leo_gain = large_scale_gain(leo.distance, cfg)
    leo_los = np.exp(2j * np.pi * leo.doppler * t * cfg.block_duration)
    f = rician_vector(leo_los, 1.0, kr, rng) * np.sqrt(leo_gain)
    return ChannelSet(h=h, g=g, f=f, block_index=t)
