import numpy as np
import pytest

from bdris_ntn.channel import ChannelSet
from bdris_ntn.config import SystemConfig
from bdris_ntn.dris import diag_phase_step, diag_response, dris_effective_gain, optimize_diag_phases
from bdris_ntn.metrics import default_feed, effective_gain
from conftest import random_channels


def test_single_element_ignores_phase():
    for theta in (0.0, 1.0, 4.0):
        assert dris_effective_gain([2 - 1j], [theta], np.array([0.5])) == pytest.approx(1.25)


def test_alignment_bound(rng):
    h, w = rng.random(6), rng.random(6)
    bound = np.sum(h * w) ** 2
    assert dris_effective_gain(h, np.zeros(6), w) == pytest.approx(bound)
    for _ in range(20):
        assert dris_effective_gain(h, rng.uniform(0, 2 * np.pi, 6), w) <= bound + 1e-12


def test_matches_dense_path(rng):
    h = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    theta, w = rng.uniform(0, 2 * np.pi, 7), default_feed(7)
    assert dris_effective_gain(h, theta, w) == pytest.approx(
        effective_gain(h, diag_response(theta), w), rel=1e-12)


def test_optimizer_aligns_phases(rng):
    cfg = SystemConfig(num_users=1, ris_elements=8, noise_w=1e-2, leo_power_w=1.0,
                       interference_cap_w=1e12)
    h = rng.random((1, 8)).astype(complex)
    ch = ChannelSet(h=h, g=np.zeros_like(h), f=np.zeros(1, complex))
    w = default_feed(8)
    theta, _ = optimize_diag_phases(np.ones(1), rng.uniform(0, 2 * np.pi, 8), ch, w, cfg)
    optimum = np.sum(h[0] * w.real) ** 2
    assert dris_effective_gain(h[0], theta, w) >= 0.99 * optimum


def test_zero_power_returns_start(rng, small_cfg):
    ch = random_channels(rng, 2, 8)
    theta0 = rng.uniform(0, 2 * np.pi, 8)
    theta, res = optimize_diag_phases(np.zeros(2), theta0, ch, default_feed(8), small_cfg)
    np.testing.assert_allclose(np.exp(1j * theta), np.exp(1j * theta0), atol=1e-14)
    assert res.iterations == 1


def test_response_stays_diagonal_unit_modulus(rng, small_cfg):
    ch = random_channels(rng, 2, 8)
    theta0 = rng.uniform(0, 2 * np.pi, 8)
    theta, res = optimize_diag_phases(rng.random(2), theta0, ch, default_feed(8), small_cfg)
    assert np.all((theta >= 0) & (theta < 2 * np.pi))
    np.testing.assert_allclose(np.abs(np.diag(res.phi)), 1.0, atol=1e-12)
    assert np.count_nonzero(res.phi - np.diag(np.diag(res.phi))) == 0
    assert res.max_unitarity_error <= 1e-12


def test_adapter_matches_direct_call(rng, small_cfg):
    ch = random_channels(rng, 2, 8)
    theta0 = rng.uniform(0, 2 * np.pi, 8)
    p, w = rng.random(2), default_feed(8)
    _, direct = optimize_diag_phases(p, theta0, ch, w, small_cfg)
    via = diag_phase_step(p, diag_response(theta0), ch, w, small_cfg)
    np.testing.assert_allclose(via.phi, direct.phi, atol=1e-12)
