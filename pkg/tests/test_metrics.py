import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bdris_ntn.channel import ChannelSet
from bdris_ntn.config import SystemConfig
from bdris_ntn.manifold import random_unitary
from bdris_ntn.metrics import (
    LinkGains,
    compute_gains,
    default_feed,
    effective_gain,
    interference_at_put,
    sinr,
    sum_rate,
)
from conftest import random_channels
from oracles import naive_effective_gain


def test_identity_selects_first_entry(rng):
    h = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    e1 = np.eye(5)[0].astype(complex)
    assert effective_gain(h, np.eye(5), e1) == pytest.approx(abs(h[0]) ** 2, rel=1e-15)


def test_zero_channel():
    assert effective_gain(np.zeros(4), np.eye(4), default_feed(4)) == 0.0


def test_matches_triple_loop(rng):
    for m in (1, 3, 8):
        h = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        phi = random_unitary(m, rng)
        w = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        assert effective_gain(h, phi, w) == pytest.approx(naive_effective_gain(h, phi, w),
                                                          rel=1e-12)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        effective_gain(np.ones(3), np.eye(4), default_feed(4))


def test_default_feed_unit_norm():
    assert np.linalg.norm(default_feed(64)) == pytest.approx(1.0)


def test_no_primary_interference_leaves_noise(rng):
    cfg = SystemConfig(num_users=3, ris_elements=4)
    ch = random_channels(rng, 3, 4, f_scale=0.0)
    gains = compute_gains(ch, np.eye(4), default_feed(4), cfg)
    np.testing.assert_array_equal(gains.b, cfg.noise_w)


def test_floor_substitution():
    # K=1: Q_p/K = 10 W, |f|^2 = 1e-12, noise 1e-12
    cfg = SystemConfig(num_users=1, ris_elements=1, leo_power_w=10.0, noise_w=1e-12)
    ch = ChannelSet(h=np.ones((1, 1), complex), g=np.ones((1, 1), complex),
                    f=np.array([1e-6 + 0j]))
    gains = compute_gains(ch, np.eye(1), default_feed(1), cfg)
    assert gains.b[0] == pytest.approx(1.1e-11, rel=1e-12)


def test_gains_recomputed_from_raw_channels(rng):
    cfg = SystemConfig(num_users=3, ris_elements=6)
    ch = random_channels(rng, 3, 6)
    phi = random_unitary(6, rng)
    w = default_feed(6)
    gains = compute_gains(ch, phi, w, cfg)
    for k in range(3):
        assert gains.a[k] == pytest.approx(naive_effective_gain(ch.h[k], phi, w), rel=1e-12)
        assert gains.c[k] == pytest.approx(naive_effective_gain(ch.g[k], phi, w), rel=1e-12)
        expected_b = cfg.noise_w + abs(ch.f[k]) ** 2 * cfg.leo_power_w / 3
        assert gains.b[k] == pytest.approx(expected_b, rel=1e-12)


def test_sinr_examples():
    assert sinr(1.0, 1.0, 0.0) == 0.0
    assert sinr(2.0, 2.0, 1.0) == 1.0
    assert sinr(2.0, 4.0, 3.0) == 1.5


def _gains(a, b, c=None):
    a = np.asarray(a, float)
    return LinkGains(a=a, b=np.asarray(b, float), c=np.zeros_like(a) if c is None else c)


def test_sum_rate_examples():
    assert sum_rate(_gains([1, 2], [1, 1]), [0, 0]) == 0.0
    assert sum_rate(_gains([1], [1]), [1]) == 1.0
    assert sum_rate(_gains([1, 3], [1, 1]), [1, 1]) == pytest.approx(3.0)


def test_link_gains_shape_check():
    with pytest.raises(ValueError):
        LinkGains(a=np.ones(2), b=np.ones(3), c=np.ones(2))


def test_interference_examples(rng):
    assert interference_at_put(0.5, 0.0) == 0.0
    assert interference_at_put(1e-3, 10.0) == pytest.approx(1e-2)
    c, p = rng.random(5), rng.random(5)
    np.testing.assert_array_equal(interference_at_put(c, p), c * p)


@given(st.lists(st.floats(0, 1e3), min_size=1, max_size=6), st.floats(0, 10))
def test_sum_rate_monotone_in_power(a, scale):
    g = _gains(a, np.ones(len(a)))
    p = np.ones(len(a))
    assert sum_rate(g, p * scale) <= sum_rate(g, p * (scale + 1)) + 1e-12
