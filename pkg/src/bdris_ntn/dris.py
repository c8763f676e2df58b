"""Conventional diagonal RIS benchmark of the same size.

The response is ``diag(exp(j theta))``. Phases are optimised by projected
gradient ascent on the same Lagrangian as the BD-RIS, with each entry pushed
back to unit modulus after the step.
"""

from __future__ import annotations

import numpy as np

from .channel import ChannelSet
from .config import SolverOptions, SystemConfig
from .manifold import (
    PhaseResult,
    PhaseTraceEntry,
    beam_gradient,
    beam_lagrangian,
    beam_objective,
    dual_update,
    interference_excess,
)


def diag_response(theta) -> np.ndarray:
    return np.diag(np.exp(1j * np.asarray(theta)))


def dris_effective_gain(channel_row, theta, w) -> float:
    """``|sum_m h_m exp(j theta_m) w_m|**2``."""
    return float(abs(np.sum(np.asarray(channel_row) * np.exp(1j * np.asarray(theta)) * w)) ** 2)


def _wrap(theta):
    return np.mod(theta, 2 * np.pi)


def optimize_diag_phases(p, theta0, ch: ChannelSet, w, cfg: SystemConfig,
                         opts: SolverOptions | None = None, mu0: float = 0.0):
    """Returns ``(theta, PhaseResult)``; ``PhaseResult.phi`` is the diagonal matrix."""
    opts = opts or cfg.solver
    p = np.asarray(p, dtype=float)
    w = np.asarray(w)
    cap_tol = opts.constraint_tolerance * cfg.interference_cap_w
    v = np.exp(1j * np.asarray(theta0, dtype=float))
    mu = float(mu0)
    trace: list[PhaseTraceEntry] = []

    def feasible_objective(vec):
        beam = vec * w
        if np.max(interference_excess(beam, p, ch, cfg)) <= cap_tol:
            return beam_objective(beam, p, ch, cfg)
        return -np.inf

    best_v, best_obj = v, feasible_objective(v)
    converged = False
    iterations = 0
    for iterations in range(1, opts.max_ris_iterations + 1):
        base = beam_lagrangian(v * w, p, mu, ch, cfg)
        grad = beam_gradient(v * w, p, mu, ch, cfg) * np.conj(w)

        new_v, eta = v, opts.step_size
        if np.any(grad):
            for _ in range(opts.max_halvings + 1):
                step = v + eta * grad
                mag = np.abs(step)
                # a vanished entry keeps its old phase
                cand = np.where(mag > 0, step / np.where(mag > 0, mag, 1.0), v)
                if beam_lagrangian(cand * w, p, mu, ch, cfg) >= base:
                    new_v = cand
                    break
                eta /= 2
        if new_v is v:
            eta = 0.0

        beam = new_v * w
        excess = interference_excess(beam, p, ch, cfg)
        mu = dual_update(mu, opts.dual_step, float(np.sum(excess)))
        slack = float(np.max(excess))
        obj = beam_objective(beam, p, ch, cfg)
        trace.append(PhaseTraceEntry(
            objective=obj, lagrangian=beam_lagrangian(beam, p, mu, ch, cfg), slack=slack,
            mu=mu, step=eta, unitarity_error=float(np.max(np.abs(np.abs(new_v) - 1))),
            tangency_error=0.0))

        if slack <= cap_tol and obj > best_obj:
            best_v, best_obj = new_v, obj
        step_norm = np.linalg.norm(new_v - v)
        v = new_v
        if step_norm < opts.phase_tolerance and slack <= cap_tol:
            converged = True
            break

    if not converged and best_obj > -np.inf:
        v = best_v
    theta = _wrap(np.angle(v))
    result = PhaseResult(phi=np.diag(v), mu=mu, iterations=iterations, converged=converged,
                         trace=trace)
    return theta, result


def diag_phase_step(p, phi, ch, w, cfg, opts=None, mu0=0.0) -> PhaseResult:
    """Adapter with the signature of ``optimize_phase`` for the AO driver."""
    _, result = optimize_diag_phases(p, np.angle(np.diag(phi)), ch, w, cfg, opts, mu0)
    return result
