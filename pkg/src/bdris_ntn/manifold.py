"""Unitary BD-RIS response optimisation by Riemannian gradient ascent.

Powers are fixed. The interference constraints enter through a single
multiplier ``mu`` updated by projected dual ascent after every step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSet
from .config import SolverOptions, SystemConfig
from .metrics import beam_gains, interference_floor

LN2 = np.log(2.0)


class DegenerateStepError(np.linalg.LinAlgError):
    """The matrix handed to the retraction is (numerically) rank deficient."""


@dataclass
class PhaseTraceEntry:
    objective: float
    lagrangian: float
    slack: float
    mu: float
    step: float
    unitarity_error: float
    tangency_error: float


@dataclass
class PhaseResult:
    phi: np.ndarray
    mu: float
    iterations: int
    converged: bool
    trace: list[PhaseTraceEntry] = field(default_factory=list)

    @property
    def max_unitarity_error(self) -> float:
        return max((t.unitarity_error for t in self.trace), default=0.0)

    @property
    def max_tangency_error(self) -> float:
        return max((t.tangency_error for t in self.trace), default=0.0)


# -- beam-level objective, shared with the diagonal baseline -------------------

def beam_objective(beam, p, ch: ChannelSet, cfg: SystemConfig) -> float:
    a = beam_gains(ch.h, beam)
    return float(np.sum(np.log2(1 + a * p / interference_floor(ch, cfg))))


def beam_lagrangian(beam, p, mu, ch: ChannelSet, cfg: SystemConfig) -> float:
    c = beam_gains(ch.g, beam)
    return beam_objective(beam, p, ch, cfg) - mu * float(np.sum(c * p - cfg.interference_cap_w))


def beam_gradient(beam, p, mu, ch: ChannelSet, cfg: SystemConfig) -> np.ndarray:
    """Gradient of the Lagrangian w.r.t. the beam, in the real inner product
    ``Re <X, Y>`` (twice the conjugate Wirtinger derivative)."""
    p = np.asarray(p, dtype=float)
    sh = ch.h @ beam
    sg = ch.g @ beam
    a = np.abs(sh) ** 2
    coef = 2 * p / (LN2 * (interference_floor(ch, cfg) + a * p))
    return ch.h.conj().T @ (coef * sh) - 2 * mu * (ch.g.conj().T @ (p * sg))


def interference_excess(beam, p, ch: ChannelSet, cfg: SystemConfig) -> np.ndarray:
    """Per-user ``c_k p_k - I_th``."""
    return beam_gains(ch.g, beam) * p - cfg.interference_cap_w


# -- operations on the unitary response ---------------------------------------

def lagrangian_value(phi, p, mu, ch: ChannelSet, w, cfg: SystemConfig) -> float:
    return beam_lagrangian(phi @ w, p, mu, ch, cfg)


def euclidean_gradient(phi, p, mu, ch: ChannelSet, w, cfg: SystemConfig) -> np.ndarray:
    """Sum of rank-one terms ``coef_k conj(h_k) (h_k^T phi w) w^H`` minus the
    matching interference-penalty terms."""
    r = beam_gradient(phi @ w, p, mu, ch, cfg)
    return np.outer(r, np.conj(w))


def tangent_project(phi, g):
    """Project ``g`` onto the tangent space of the unitary group at ``phi``."""
    s = phi.conj().T @ g
    return g - phi @ (s + s.conj().T) / 2


def svd_retract(z):
    """Unitary polar factor ``U V^H`` of ``z``."""
    u, s, vh = np.linalg.svd(z)
    if s[-1] < 1e-12 * s[0] or s[0] == 0:
        raise DegenerateStepError("retraction of a rank-deficient matrix")
    return u @ vh


def lowrank_retract(phi, p_tan, eta, w):
    """Same result as ``svd_retract(phi + eta * p_tan)`` for tangents built from
    a rank-one Euclidean gradient ``r w^H``, in O(M^2).

    ``phi^H p_tan`` is skew-Hermitian with range inside span{w, phi^H r}, so the
    polar factor differs from the identity only on that plane.
    """
    omega_w = phi.conj().T @ (p_tan @ (np.conj(w) / np.vdot(w, w)))
    basis, sv, _ = np.linalg.svd(np.column_stack([w, omega_w]), full_matrices=False)
    q = basis[:, sv > 1e-14 * max(sv[0], 1e-300)]
    if q.shape[1] == 0:
        return phi.copy()
    omega_small = q.conj().T @ (phi.conj().T @ (p_tan @ q))
    small = np.eye(q.shape[1]) + eta * omega_small
    u, s, vh = np.linalg.svd(small)
    if s[-1] < 1e-12 * s[0]:
        raise DegenerateStepError("retraction of a rank-deficient matrix")
    polar = u @ vh
    return phi + (phi @ q) @ (polar - np.eye(q.shape[1])) @ q.conj().T


def dual_update(mu: float, alpha: float, excess: float) -> float:
    return max(0.0, mu + alpha * excess)


def unitarity_error(phi) -> float:
    return float(np.linalg.norm(phi @ phi.conj().T - np.eye(phi.shape[0])))


def tangency_error(phi, p_tan) -> float:
    s = phi.conj().T @ p_tan
    return float(np.linalg.norm(s + s.conj().T))


def random_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    return svd_retract(z)


def optimize_phase(p, phi0, ch: ChannelSet, w, cfg: SystemConfig,
                   opts: SolverOptions | None = None, mu0: float = 0.0) -> PhaseResult:
    """Projected Riemannian gradient ascent on the Lagrangian.

    Each iteration takes a step of ``eta`` along the projected gradient,
    halving it (at most ``max_halvings`` times) while the Lagrangian drops, then
    retracts and updates ``mu``. Stops once the step is below
    ``phase_tolerance`` with no per-user cap violated. Without convergence the
    best iterate that respects every cap is returned.
    """
    opts = opts or cfg.solver
    p = np.asarray(p, dtype=float)
    cap_tol = opts.constraint_tolerance * cfg.interference_cap_w
    phi = np.array(phi0, dtype=complex)
    mu = float(mu0)
    trace: list[PhaseTraceEntry] = []

    def feasible_objective(candidate):
        beam = candidate @ w
        if np.max(interference_excess(beam, p, ch, cfg)) <= cap_tol:
            return beam_objective(beam, p, ch, cfg)
        return -np.inf

    best_phi, best_obj = phi, feasible_objective(phi)
    converged = False
    iterations = 0
    for iterations in range(1, opts.max_ris_iterations + 1):
        base = lagrangian_value(phi, p, mu, ch, w, cfg)
        p_tan = tangent_project(phi, euclidean_gradient(phi, p, mu, ch, w, cfg))
        tan_err = tangency_error(phi, p_tan)

        new_phi, eta = phi, opts.step_size
        if np.any(p_tan):
            for _ in range(opts.max_halvings + 1):
                if opts.retraction == "lowrank":
                    cand = lowrank_retract(phi, p_tan, eta, w)
                else:
                    cand = svd_retract(phi + eta * p_tan)
                if lagrangian_value(cand, p, mu, ch, w, cfg) >= base:
                    new_phi = cand
                    break
                eta /= 2
        if new_phi is phi:
            eta = 0.0

        beam = new_phi @ w
        excess = interference_excess(beam, p, ch, cfg)
        mu = dual_update(mu, opts.dual_step, float(np.sum(excess)))
        slack = float(np.max(excess))
        obj = beam_objective(beam, p, ch, cfg)
        trace.append(PhaseTraceEntry(
            objective=obj, lagrangian=lagrangian_value(new_phi, p, mu, ch, w, cfg),
            slack=slack, mu=mu, step=eta, unitarity_error=unitarity_error(new_phi),
            tangency_error=tan_err))

        if slack <= cap_tol and obj > best_obj:
            best_phi, best_obj = new_phi, obj
        step_norm = np.linalg.norm(new_phi - phi)
        phi = new_phi
        if step_norm < opts.phase_tolerance and slack <= cap_tol:
            converged = True
            break

    if converged or best_obj == -np.inf:
        return PhaseResult(phi=phi, mu=mu, iterations=iterations, converged=converged, trace=trace)
    return PhaseResult(phi=best_phi, mu=mu, iterations=iterations, converged=False, trace=trace)
