import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bdris_ntn.channel import ChannelSet  # noqa: E402
from bdris_ntn.config import SystemConfig  # noqa: E402

ACCEPTANCE_LINES: list[tuple[int, str]] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_channels(rng, k, m, scale=1.0, f_scale=1e-3):
    def cn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    return ChannelSet(h=scale * cn(k, m), g=scale * cn(k, m), f=f_scale * cn(k))


@pytest.fixture
def small_cfg():
    return SystemConfig(num_users=2, ris_elements=8, noise_w=1e-3, leo_power_w=1.0,
                        haps_power_w=1.0, interference_cap_w=10.0)
