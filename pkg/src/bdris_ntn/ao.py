"""Alternating optimisation of HAPS powers and the RIS response."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channel import ChannelSet
from .config import SystemConfig
from .manifold import PhaseResult, optimize_phase
from .metrics import compute_gains, interference_at_put, sum_rate
from .power import PowerAllocation, solve_power

PhaseStep = Callable[..., PhaseResult]


class SolverError(RuntimeError):
    """A subproblem failed; ``iteration`` is the AO iteration it failed in."""

    def __init__(self, message, iteration):
        super().__init__(f"AO iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass
class AOIterate:
    asr_before_power: float
    asr_after_power: float
    asr: float
    dp2: float
    dphi2: float
    slack: float
    phase_accepted: bool
    phase_iterations: int


@dataclass
class Solution:
    power: PowerAllocation
    phi: np.ndarray
    asr: float
    interference: np.ndarray
    iterations_used: int
    converged: bool
    trace: list[AOIterate] = field(default_factory=list)
    max_unitarity_error: float = 0.0
    max_tangency_error: float = 0.0
    phase_iterations: int = 0

    @property
    def p(self) -> np.ndarray:
        return self.power.p


def converged(p_prev, p_curr, phi_prev, phi_curr, slack: float, tol: float,
              slack_tol: float) -> bool:
    """Strict ``||dp||^2 + ||dPhi||_F^2 < tol`` together with ``slack <= slack_tol``."""
    if p_prev is None:
        return False
    change = float(np.sum(np.abs(np.asarray(p_curr) - p_prev) ** 2)
                   + np.linalg.norm(np.asarray(phi_curr) - phi_prev) ** 2)
    return change < tol and slack <= slack_tol


def _feasible_part(p, c, cap_w):
    with np.errstate(divide="ignore"):
        caps = np.where(c > 0, cap_w / np.where(c > 0, c, 1.0), np.inf)
    return np.minimum(p, caps)


def _best_power(gains, cfg, fallback):
    """Exact power step, never worse than the feasible part of ``fallback``."""
    alloc = solve_power(gains, cfg.haps_power_w, cfg.interference_cap_w, cfg.solver)
    if fallback is None:
        return alloc
    kept = _feasible_part(fallback.p, gains.c, cfg.interference_cap_w)
    if sum_rate(gains, kept) > sum_rate(gains, alloc.p):
        return PowerAllocation(p=kept, lam=alloc.lam, nu=alloc.nu, water_level=alloc.water_level)
    return alloc


def alternate(cfg: SystemConfig, ch: ChannelSet, w, phi0,
              phase_step: PhaseStep = optimize_phase) -> Solution:
    """Alternate the closed-form power step and the phase step until the joint
    update is below ``ao_tolerance`` with every cap respected.

    A phase step is kept only if the sum rate with the powers trimmed to the new
    caps does not fall; otherwise the previous response is retained.
    """
    opts = cfg.solver
    cap_w = cfg.interference_cap_w
    slack_tol = opts.constraint_tolerance * cap_w
    phi = np.array(phi0, dtype=complex)
    mu = 0.0
    prev: PowerAllocation | None = None
    trace: list[AOIterate] = []
    done = False
    unit_err = tan_err = 0.0
    phase_iters = 0
    i = 0

    for i in range(1, opts.max_ao_iterations + 1):
        try:
            gains = compute_gains(ch, phi, w, cfg)
            before = (sum_rate(gains, _feasible_part(prev.p, gains.c, cap_w))
                      if prev is not None else 0.0)
            alloc = _best_power(gains, cfg, prev)
            asr_power = sum_rate(gains, alloc.p)
            result = phase_step(alloc.p, phi, ch, w, cfg, opts, mu)
        except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
            raise SolverError(str(exc), i) from exc
        mu = result.mu
        phase_iters += result.iterations
        unit_err = max(unit_err, result.max_unitarity_error)
        tan_err = max(tan_err, result.max_tangency_error)

        cand_gains = compute_gains(ch, result.phi, w, cfg)
        cand_asr = sum_rate(cand_gains, _feasible_part(alloc.p, cand_gains.c, cap_w))
        accepted = cand_asr >= asr_power
        new_phi = result.phi if accepted else phi
        new_gains = cand_gains if accepted else gains
        slack = float(np.max(interference_at_put(new_gains.c, alloc.p) - cap_w))

        is_done = converged(None if prev is None else prev.p, alloc.p, phi, new_phi,
                            slack, opts.ao_tolerance, slack_tol)
        trace.append(AOIterate(
            asr_before_power=before, asr_after_power=asr_power,
            asr=cand_asr if accepted else asr_power,
            dp2=float(np.sum((alloc.p - prev.p) ** 2)) if prev is not None else float("nan"),
            dphi2=float(np.linalg.norm(new_phi - phi) ** 2), slack=slack,
            phase_accepted=accepted, phase_iterations=result.iterations))
        phi, prev = new_phi, alloc
        if is_done:
            done = True
            break

    gains = compute_gains(ch, phi, w, cfg)
    final = _best_power(gains, cfg, prev)
    return Solution(
        power=final, phi=phi, asr=sum_rate(gains, final.p),
        interference=interference_at_put(gains.c, final.p), iterations_used=i,
        converged=done, trace=trace, max_unitarity_error=unit_err,
        max_tangency_error=tan_err, phase_iterations=phase_iters)
