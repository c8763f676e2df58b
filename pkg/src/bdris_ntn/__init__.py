"""Spectrum sharing for a BD-RIS equipped HAPS beneath a primary LEO system.

Alternates a water-filling power step with Riemannian optimisation of the
unitary RIS response, and benchmarks against a diagonal RIS.
"""

from .ao import Solution, alternate, converged
from .channel import ChannelSet, generate_channel_set
from .config import SolverOptions, SystemConfig, load_config
from .manifold import optimize_phase
from .metrics import LinkGains, compute_gains, default_feed, sum_rate
from .power import PowerAllocation, solve_power

__all__ = [
    "ChannelSet",
    "LinkGains",
    "PowerAllocation",
    "Solution",
    "SolverOptions",
    "SystemConfig",
    "alternate",
    "compute_gains",
    "converged",
    "default_feed",
    "generate_channel_set",
    "load_config",
    "optimize_phase",
    "solve_power",
    "sum_rate",
]
