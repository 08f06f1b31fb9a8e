"""Special functions backing the quasi-Gaussian family.

Log-gamma, the regularized lower incomplete gamma function P(a, x) and its
inverse in x. P(a, x) is evaluated by its power series for ``x < a + 1`` and
by a modified-Lentz continued fraction for the complement otherwise, in
plain float64.
"""

import math

import numpy as np

__all__ = ["log_gamma", "reg_lower_gamma", "inv_reg_lower_gamma"]

_EPS = np.finfo(float).eps
_TINY = 1e-300
_MAX_ITER = 2000


def log_gamma(x):
    """Natural log of the gamma function for x > 0.

    Accepts scalars or arrays; scalars come back as ``float``.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("log_gamma requires x > 0")
    if arr.ndim == 0:
        return math.lgamma(float(arr))
    return np.vectorize(math.lgamma, otypes=[float])(arr)


def _log_prefactor(a, x):
    # log(x^a e^-x / Gamma(a)), x > 0
    lg = np.vectorize(math.lgamma, otypes=[float])(a)
    return a * np.log(x) - x - lg


def _series_p(a, x):
    """P(a, x) by the series sum_n x^n / (a (a+1) ... (a+n)); x > 0."""
    term = 1.0 / a
    total = term.copy()
    ap = a.copy()
    active = np.ones(a.shape, dtype=bool)
    for _ in range(_MAX_ITER):
        ap = ap + 1.0
        term = np.where(active, term * x / ap, 0.0)
        total = total + term
        active &= np.abs(term) > np.abs(total) * _EPS * 0.5
        if not active.any():
            break
    else:
        raise ArithmeticError("incomplete gamma series did not converge")
    return np.exp(_log_prefactor(a, x)) * total


def _contfrac_q(a, x):
    """Q(a, x) = 1 - P(a, x) by the Legendre continued fraction; x >= a + 1."""
    b = x + 1.0 - a
    c = np.full(a.shape, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(a.shape, dtype=bool)
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = np.where(active, d * c, 1.0)
        h = h * delta
        active &= np.abs(delta - 1.0) > _EPS
        if not active.any():
            break
    else:
        raise ArithmeticError("incomplete gamma continued fraction did not converge")
    return np.exp(_log_prefactor(a, x)) * h


def _gamma_pq(a, x):
    """Both regularized incomplete gammas (P, Q), each to full relative accuracy
    on the side where it is computed directly."""
    a, x = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(x, dtype=float))
    if np.any(~(a > 0)):
        raise ValueError("incomplete gamma requires a > 0")
    if np.any(~(x >= 0)):
        raise ValueError("incomplete gamma requires x >= 0")
    p = np.zeros(a.shape)
    q = np.ones(a.shape)
    inf = np.isinf(x)
    p[inf], q[inf] = 1.0, 0.0
    use_series = (x > 0) & (x < a + 1.0)
    use_cf = (x >= a + 1.0) & ~inf
    if use_series.any():
        p[use_series] = _series_p(a[use_series], x[use_series])
        q[use_series] = 1.0 - p[use_series]
    if use_cf.any():
        q[use_cf] = _contfrac_q(a[use_cf], x[use_cf])
        p[use_cf] = 1.0 - q[use_cf]
    return np.clip(p, 0.0, 1.0), np.clip(q, 0.0, 1.0)


def reg_lower_gamma(a, x):
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).

    Parameters
    ----------
    a : float or array_like
        Shape, a > 0.
    x : float or array_like
        Upper integration limit, x >= 0 (``inf`` allowed).

    Returns
    -------
    float or ndarray
        Broadcast result; a plain float when both inputs are scalars.
    """
    p, _ = _gamma_pq(a, x)
    return float(p) if p.ndim == 0 else p


def _reg_upper_gamma(a, x):
    _, q = _gamma_pq(a, x)
    return float(q) if q.ndim == 0 else q


def _inv_scalar(a, p):
    lg = math.lgamma(a)
    # P(a, x) <= x^a / Gamma(a + 1), so this is a lower bound for the root.
    lo = math.exp((math.log(p) + math.lgamma(a + 1.0)) / a)
    if reg_lower_gamma(a, lo) >= p:
        return lo
    hi = max(2.0 * lo, a + 1.0)
    while reg_lower_gamma(a, hi) < p:
        lo, hi = hi, 2.0 * hi
    x = math.sqrt(lo * hi) if lo > 0 else 0.5 * hi
    for _ in range(200):
        f = reg_lower_gamma(a, x) - p
        if f == 0.0:
            return x
        if f < 0:
            lo = x
        else:
            hi = x
        if abs(f) <= 1e-15 or hi - lo <= 4 * _EPS * hi:
            return x
        dens = math.exp((a - 1.0) * math.log(x) - x - lg)
        step = x - f / dens if dens > 0 else float("nan")
        if lo < step < hi:
            x = step
        elif lo > 0 and hi / lo > 4.0:
            x = math.sqrt(lo * hi)
        else:
            x = 0.5 * (lo + hi)
    return x


def inv_reg_lower_gamma(a, p):
    """Inverse of :func:`reg_lower_gamma` in its second argument.

    Finds x with P(a, x) = p for a > 0 and 0 < p < 1 by bracketing followed by
    Newton steps that fall back to bisection whenever they leave the bracket.
    """
    a_arr, p_arr = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(p, dtype=float))
    if np.any(~(a_arr > 0)):
        raise ValueError("inv_reg_lower_gamma requires a > 0")
    if np.any(~((p_arr > 0) & (p_arr < 1))):
        raise ValueError("inv_reg_lower_gamma requires 0 < p < 1")
    out = np.vectorize(_inv_scalar, otypes=[float])(a_arr, p_arr)
    return float(out) if out.ndim == 0 else out
