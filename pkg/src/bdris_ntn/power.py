"""HAPS power control for a fixed RIS response.

The sum rate is concave in the powers, so the KKT point is optimal. Powers
follow the water-filling form

    p_k = max(0, 1 / (ln2 * (lambda_k c_k + nu)) - b_k / a_k)

with per-user interference duals ``lambda_k`` found by an inner bisection and
the total-power dual ``nu`` by an outer bisection.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .config import SolverOptions
from .metrics import LinkGains

LN2 = np.log(2.0)
_MAX_DOUBLINGS = 1000


class NoActiveConstraintError(ValueError):
    """Water level is unbounded: neither dual prices the power."""


class BisectionError(RuntimeError):
    """A dual bisection ran out of iterations before meeting its tolerance."""

    def __init__(self, message, lo=None, hi=None):
        super().__init__(message)
        self.lo = lo
        self.hi = hi


@dataclass(frozen=True)
class PowerAllocation:
    p: np.ndarray
    lam: np.ndarray
    nu: float
    water_level: np.ndarray

    @property
    def total(self) -> float:
        return float(np.sum(self.p))


def waterfill_power(a, b, c, lam, nu):
    """Closed-form power for given duals; array inputs broadcast."""
    a, b, c, lam = (np.asarray(x, dtype=float) for x in (a, b, c, lam))
    denom = lam * c + nu
    if np.any(denom <= 0):
        raise NoActiveConstraintError("lambda*c + nu must be positive for a bounded water level")
    p = np.maximum(0.0, 1.0 / (LN2 * denom) - b / a)
    return p if p.ndim else float(p)


def _power(a, b, c, lam, nu):
    # unbounded entries become +inf instead of raising
    denom = lam * c + nu
    with np.errstate(divide="ignore"):
        level = np.where(denom > 0, 1.0 / (LN2 * np.where(denom > 0, denom, 1.0)), np.inf)
    return np.maximum(0.0, level - b / a)


def _bisect_lambdas(a, b, c, nu, cap_w, opts: SolverOptions):
    """Vectorised inner bisection over users (all ``a > 0``)."""
    lam = np.zeros_like(a)
    with np.errstate(divide="ignore"):
        cap = np.where(c > 0, cap_w / np.where(c > 0, c, 1.0), np.inf)
    need = _power(a, b, c, lam, nu) > cap
    if not np.any(need):
        return lam
    a, b, c, cap = a[need], b[need], c[need], cap[need]
    hi = np.ones_like(a)
    for _ in range(_MAX_DOUBLINGS):
        over = _power(a, b, c, hi, nu) > cap
        if not np.any(over):
            break
        hi[over] *= 2.0
    lo = np.zeros_like(a)
    tol = opts.bisect_tol_lambda
    for _ in range(opts.max_bisect):
        done = cap - _power(a, b, c, hi, nu) <= tol * cap
        if np.all(done):
            break
        mid = 0.5 * (lo + hi)
        above = _power(a, b, c, mid, nu) > cap
        lo = np.where(~done & above, mid, lo)
        hi = np.where(~done & ~above, mid, hi)
    else:
        if not np.all(cap - _power(a, b, c, hi, nu) <= tol * cap):
            raise BisectionError("lambda bisection did not converge", lo=lo, hi=hi)
    lam[need] = hi
    return lam


def inner_bisect_lambda(a: float, b: float, c: float, nu: float, cap_w: float,
                        opts: SolverOptions | None = None) -> float:
    """Interference dual of one user for a given ``nu``.

    Returns 0 when the unconstrained water-filling power already respects
    ``c * p <= cap_w``. Otherwise the bracket ``[0, Lambda_max]`` is grown by
    doubling from 1 and bisected until ``p`` sits within the relative
    tolerance below ``cap_w / c``.
    """
    opts = opts or SolverOptions()
    lam = _bisect_lambdas(np.array([a], float), np.array([b], float), np.array([c], float),
                          float(nu), cap_w, opts)
    return float(lam[0])


def lambda_active_shortcut(c: float, cap_w: float) -> float:
    """Dual guess ``c / I_th`` for a constraint known to be active."""
    return c / cap_w


def _allocation(a, b, c, nu, cap_w, opts):
    active = a > 0
    p = np.zeros_like(a)
    lam = np.zeros_like(a)
    if np.any(active):
        lam[active] = _bisect_lambdas(a[active], b[active], c[active], nu, cap_w, opts)
        p[active] = _power(a[active], b[active], c[active], lam[active], nu)
    return p, lam


def outer_bisect_nu(gains: LinkGains, p_total: float, cap_w: float,
                    opts: SolverOptions | None = None) -> tuple[float, PowerAllocation]:
    """Total-power dual ``nu`` and the matching allocation.

    ``P(nu)`` is non-increasing, so ``nu = 0`` is returned when the caps alone
    keep the total within budget; otherwise ``nu_max`` doubles from 1 and the
    bracket is bisected, always returning its feasible (upper) end.
    """
    opts = opts or SolverOptions()
    a, b, c = (np.asarray(x, dtype=float) for x in (gains.a, gains.b, gains.c))

    def result(nu):
        p, lam = _allocation(a, b, c, nu, cap_w, opts)
        denom = lam * c + nu
        with np.errstate(divide="ignore"):
            level = np.where(denom > 0, 1.0 / (LN2 * np.where(denom > 0, denom, 1.0)), np.inf)
        return PowerAllocation(p=p, lam=lam, nu=float(nu), water_level=level)

    at_zero = result(0.0)
    if at_zero.total <= p_total:
        return 0.0, at_zero

    hi = 1.0
    for _ in range(_MAX_DOUBLINGS):
        alloc_hi = result(hi)
        if alloc_hi.total <= p_total:
            break
        hi *= 2.0
    lo = 0.0
    tol = opts.bisect_tol_nu * p_total
    for _ in range(opts.max_bisect):
        if p_total - alloc_hi.total <= tol:
            return hi, alloc_hi
        mid = 0.5 * (lo + hi)
        alloc_mid = result(mid)
        if alloc_mid.total > p_total:
            lo = mid
        else:
            hi, alloc_hi = mid, alloc_mid
    if p_total - alloc_hi.total <= tol:
        return hi, alloc_hi
    raise BisectionError("nu bisection did not converge", lo=lo, hi=hi)


def solve_power(gains: LinkGains, p_total: float, cap_w: float,
                opts: SolverOptions | None = None) -> PowerAllocation:
    """Optimal powers for fixed gains under the total budget and per-user caps."""
    if not np.any(np.asarray(gains.a) > 0):
        warnings.warn("all desired-link gains are zero; allocating no power", RuntimeWarning,
                      stacklevel=2)
        k = gains.num_users
        return PowerAllocation(p=np.zeros(k), lam=np.zeros(k), nu=0.0,
                               water_level=np.full(k, np.inf))
    _, alloc = outer_bisect_nu(gains, p_total, cap_w, opts)
    return alloc


def kkt_residuals(gains: LinkGains, alloc: PowerAllocation, p_total: float,
                  cap_w: float) -> dict[str, float]:
    """Scale-free KKT residuals of an allocation (0 means exact).

    Stationarity and dual feasibility are relative to the dual price
    ``lambda_k c_k + nu``; primal feasibility and complementary slackness are
    relative to ``cap_w`` and ``p_total``.
    """
    a, b, c = gains.a, gains.b, gains.c
    p, lam, nu = alloc.p, alloc.lam, alloc.nu
    price = lam * c + nu
    marginal = np.where(a > 0, a / (LN2 * (b + a * p)), 0.0)
    on = (p > 0) & (a > 0)
    off = (p == 0) & (a > 0)
    scale = np.where(price > 0, price, 1.0)
    stationarity = np.max(np.abs(marginal - price)[on] / scale[on], initial=0.0)
    dual_feas = np.max(np.maximum(0.0, marginal - price)[off] / scale[off], initial=0.0)
    interference = c * p
    primal = max(float(np.max(np.maximum(0.0, interference - cap_w)) / cap_w),
                 max(0.0, p.sum() - p_total) / p_total,
                 float(np.max(np.maximum(0.0, -p))))
    cs_lam = np.max(np.abs(interference - cap_w)[lam > 0] / cap_w, initial=0.0)
    cs_nu = abs(p.sum() - p_total) / p_total if nu > 0 else 0.0
    return {
        "stationarity": float(stationarity),
        "dual_feasibility": float(dual_feas),
        "primal_feasibility": float(primal),
        "complementary_slackness": float(max(cs_lam, cs_nu)),
        "dual_sign": float(max(0.0, -min(nu, float(np.min(lam, initial=0.0))))),
    }
