"""Independent reference computations used as test oracles.

Nothing here imports the solver paths it is compared against.
"""

import numpy as np

LN2 = np.log(2.0)


def naive_effective_gain(h, phi, w):
    """|sum_i sum_j h_i phi_ij w_j|^2 by explicit loops."""
    m = len(w)
    total = 0j
    for i in range(m):
        for j in range(m):
            total += h[i] * phi[i, j] * w[j]
    return abs(total) ** 2


def _rate(s, p):
    return float(np.sum(np.log2(1 + s * p)))


def _scaled_projection(y, hdiag, upper, budget):
    """argmin sum_k hdiag_k (x_k - y_k)^2 over 0 <= x <= upper, sum x <= budget."""
    x = np.clip(y, 0.0, upper)
    if x.sum() <= budget:
        return x
    lo, hi = 0.0, 1.0
    while np.clip(y - hi / hdiag, 0.0, upper).sum() > budget:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.clip(y - mid / hdiag, 0.0, upper).sum() > budget:
            lo = mid
        else:
            hi = mid
    return np.clip(y - hi / hdiag, 0.0, upper)


def power_oracle(a, b, c, p_total, cap_w, iterations=2000):
    """Projected Newton ascent (diagonal Hessian metric, Armijo on the projection
    arc) for max sum log2(1 + a p / b) s.t. c p <= cap, sum p <= p_total, p >= 0.

    Returns (p, sum_rate).
    """
    a, b, c = (np.asarray(x, float) for x in (a, b, c))
    s = a / b
    with np.errstate(divide="ignore"):
        upper = np.where(c > 0, cap_w / np.where(c > 0, c, 1.0), np.inf)
    upper = np.where(s > 0, upper, 0.0)
    p = _scaled_projection(np.full_like(s, p_total / len(s)), np.ones_like(s), upper, p_total)
    value = _rate(s, p)
    for _ in range(iterations):
        grad = s / (LN2 * (1 + s * p))
        hess = np.where(s > 0, s**2 / (LN2 * (1 + s * p) ** 2), 1.0)
        t = 1.0
        while True:
            cand = _scaled_projection(p + t * grad / hess, hess, upper, p_total)
            cand_value = _rate(s, cand)
            if cand_value >= value + 1e-4 * grad @ (cand - p) or t < 1e-12:
                break
            t *= 0.5
        done = np.max(np.abs(cand - p)) <= 1e-15 * max(1.0, np.max(p))
        if cand_value >= value:
            p, value = cand, cand_value
        if done:
            break
    return p, value


def finite_difference_gradient(fun, x, step=1e-6):
    """Central differences of a real function of a complex array; entry
    (i, j) is d/dRe + 1j d/dIm."""
    grad = np.zeros_like(x, dtype=complex)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        e = np.zeros_like(x, dtype=complex)
        e[idx] = step
        d_re = (fun(x + e) - fun(x - e)) / (2 * step)
        e[idx] = 1j * step
        d_im = (fun(x + e) - fun(x - e)) / (2 * step)
        grad[idx] = d_re + 1j * d_im
    return grad


def log_uniform(rng, lo, hi, size=None):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size))
