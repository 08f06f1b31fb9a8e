"""Univariate quasi-Gaussian distribution QN(a, alpha, sigma, C1, C2).

The density is a Gaussian kernel centered at ``a`` multiplied by a two-sided
power weight::

    g(x) = C2 * (x - a)**alpha_pos * f_sigma(x - a)      x > a
    g(x) = C1 * |x - a|**alpha_neg * f_sigma(x - a)      x < a

where ``f_sigma`` is the centered normal density. Normalization ties the two
constants together, so a parameter set is built from ``right_mass``, the
probability of falling to the right of ``a``.
"""

import json
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .specfun import _gamma_pq, log_gamma

__all__ = [
    "QuasiGaussianParams",
    "SingularPointWarning",
    "i_alpha",
    "make_params",
    "pdf",
    "logpdf",
    "cdf",
    "sf",
    "quantile",
    "sample",
    "moment",
    "mean",
    "second_moment",
    "tail_asymptote",
    "params_to_json",
    "params_from_json",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)
MOMENT_SIDES = ("positive", "negative", "absolute", "signed")


class SingularPointWarning(RuntimeWarning):
    """Density evaluated exactly at a quasi-center where it is unbounded."""


def i_alpha(alpha, sigma):
    """Closed form of the half-line integral of x**alpha * exp(-x**2 / (2 sigma**2)).

    Equals ``2**((alpha - 1) / 2) * sigma**(alpha + 1) * Gamma((alpha + 1) / 2)``.
    """
    if not alpha > -1:
        raise ValueError(f"i_alpha requires alpha > -1, got {alpha}")
    if not sigma > 0:
        raise ValueError(f"i_alpha requires sigma > 0, got {sigma}")
    if alpha < 300 and 1e-30 < sigma < 1e30:
        return 2.0 ** (0.5 * (alpha - 1.0)) * sigma ** (alpha + 1.0) * math.gamma(0.5 * (alpha + 1.0))
    return math.exp(_log_i_alpha(alpha, sigma))


def _log_i_alpha(alpha, sigma):
    return 0.5 * (alpha - 1.0) * math.log(2.0) + (alpha + 1.0) * math.log(sigma) + log_gamma(0.5 * (alpha + 1.0))


@dataclass(frozen=True)
class QuasiGaussianParams:
    """Parameters of QN(a, (alpha_neg, alpha_pos), sigma, c_neg, c_pos).

    Construction validates the domain and the normalization
    ``c_neg * I(alpha_neg) + c_pos * I(alpha_pos) = sigma * sqrt(2 pi)``
    to relative ``rtol``. Prefer :func:`make_params`, which satisfies it by
    construction.
    """

    a: float
    alpha_neg: float
    alpha_pos: float
    sigma: float
    c_neg: float
    c_pos: float

    def __post_init__(self):
        for name in ("a", "alpha_neg", "alpha_pos", "sigma", "c_neg", "c_pos"):
            object.__setattr__(self, name, float(getattr(self, name)))
        self.validate()

    def validate(self, rtol=1e-12):
        if not math.isfinite(self.a):
            raise ValueError("quasi-center a must be finite")
        if not (self.alpha_neg > -1 and self.alpha_pos > -1):
            raise ValueError("exponents must satisfy alpha > -1")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be positive and finite")
        if not (self.c_neg >= 0 and self.c_pos >= 0) or self.c_neg + self.c_pos <= 0:
            raise ValueError("need c_neg, c_pos >= 0 with c_neg + c_pos > 0")
        total = self.left_mass + self.right_mass
        if abs(total - 1.0) > rtol:
            raise ValueError(f"normalization violated: total mass {total!r} != 1 (rtol {rtol})")

    @property
    def left_mass(self):
        """P(xi < a)."""
        if self.c_neg == 0:
            return 0.0
        return self.c_neg * i_alpha(self.alpha_neg, self.sigma) / (self.sigma * SQRT_2PI)

    @property
    def right_mass(self):
        """P(xi > a)."""
        if self.c_pos == 0:
            return 0.0
        return self.c_pos * i_alpha(self.alpha_pos, self.sigma) / (self.sigma * SQRT_2PI)


def make_params(a, alpha_neg, alpha_pos, sigma, right_mass):
    """Build normalized parameters from the mass placed right of ``a``.

    >>> p = make_params(0.0, 0.0, 0.0, 1.0, 0.5)
    >>> round(p.c_neg, 12), round(p.c_pos, 12)
    (1.0, 1.0)
    """
    if not 0.0 <= right_mass <= 1.0:
        raise ValueError(f"right_mass must lie in [0, 1], got {right_mass}")
    scale = sigma * SQRT_2PI if sigma > 0 else float("nan")
    c_pos = right_mass * scale / i_alpha(alpha_pos, sigma)
    c_neg = (1.0 - right_mass) * scale / i_alpha(alpha_neg, sigma)
    return QuasiGaussianParams(a, alpha_neg, alpha_pos, sigma, c_neg, c_pos)


def _side_log_density(d, c, alpha, sigma):
    # log of c * d**alpha * f_sigma(d) for d > 0; -inf when c == 0
    if c == 0:
        return np.full(np.shape(d), -np.inf)
    return math.log(c) + alpha * np.log(d) - math.log(sigma * SQRT_2PI) - 0.5 * (d / sigma) ** 2


def _center_limit(c, alpha, sigma):
    if c == 0 or alpha > 0:
        return 0.0
    if alpha == 0:
        return c / (sigma * SQRT_2PI)
    return np.inf


def logpdf(params, x):
    """Log density; ``-inf`` outside the support, ``+inf`` at a singular center."""
    x = np.asarray(x, dtype=float)
    d = x - params.a
    out = np.full(x.shape, -np.inf)
    right, left, center = d > 0, d < 0, d == 0
    out[right] = _side_log_density(d[right], params.c_pos, params.alpha_pos, params.sigma)
    out[left] = _side_log_density(-d[left], params.c_neg, params.alpha_neg, params.sigma)
    if center.any():
        # The value at the center is a convention: mean of the one-sided limits.
        limits = (
            _center_limit(params.c_neg, params.alpha_neg, params.sigma),
            _center_limit(params.c_pos, params.alpha_pos, params.sigma),
        )
        value = 0.5 * (limits[0] + limits[1])
        if np.isinf(value):
            warnings.warn(
                f"density is unbounded at the quasi-center a={params.a!r}; returning +inf",
                SingularPointWarning,
                stacklevel=3,
            )
        with np.errstate(divide="ignore"):
            out[center] = np.log(value)
    return float(out) if out.ndim == 0 else out


def pdf(params, x):
    """Density at ``x`` (scalar or array).

    At ``x == a`` the value is 0 when both exponents are positive and the
    one-sided Gaussian limit when an exponent is 0. A negative exponent makes
    the center singular: ``+inf`` is returned and a
    :class:`SingularPointWarning` is issued.
    """
    out = np.exp(logpdf(params, x))
    return float(out) if np.ndim(out) == 0 else out


def _side_tail_split(params, x):
    """For each x return (P(xi <= x), P(xi > x)), each computed without
    subtracting from one in the tail it describes."""
    x = np.asarray(x, dtype=float)
    d = x - params.a
    two_s2 = 2.0 * params.sigma**2
    left_m, right_m = params.left_mass, params.right_mass
    lower = np.empty(x.shape)
    upper = np.empty(x.shape)

    neg = d < 0
    if neg.any():
        p, q = _gamma_pq(0.5 * (params.alpha_neg + 1.0), d[neg] ** 2 / two_s2)
        lower[neg] = left_m * q
        upper[neg] = right_m + left_m * p
    pos = ~neg
    if pos.any():
        p, q = _gamma_pq(0.5 * (params.alpha_pos + 1.0), d[pos] ** 2 / two_s2)
        lower[pos] = left_m + right_m * p
        upper[pos] = right_m * q
    return lower, upper


def cdf(params, x):
    """P(xi <= x) through the regularized lower incomplete gamma function."""
    lower, _ = _side_tail_split(params, x)
    lower = np.clip(lower, 0.0, 1.0)
    return float(lower) if lower.ndim == 0 else lower


def sf(params, x):
    """P(xi > x), accurate far into the upper tail."""
    _, upper = _side_tail_split(params, x)
    upper = np.clip(upper, 0.0, 1.0)
    return float(upper) if upper.ndim == 0 else upper


def quantile(params, u, max_iter=200, xtol=1e-12):
    """Inverse cdf by vectorized bisection.

    The bracket is bisected in ``w = sign(d) |d/sigma|**(alpha + 1)`` (with
    ``d = x - a`` and the exponent of the side), in which the cdf is close to
    linear near the center, so points next to a singular center are reached
    quickly. No derivatives are used. Stops per element once the cdf matches
    ``u`` to 1e-13 with the x-bracket narrower than ``xtol`` (relative to
    max(1, |x|)), at float resolution, or after ``max_iter`` steps.
    ``u`` within 1e-15 of the mass left of ``a`` maps to ``a`` itself, since
    a cdf that is flat at the center cannot resolve it further.
    """
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0) & (u < 1))):
        raise ValueError("quantile requires 0 < u < 1")
    k_neg, k_pos = params.alpha_neg + 1.0, params.alpha_pos + 1.0

    def to_x(w):
        with np.errstate(over="ignore"):
            mag = np.where(w < 0, np.abs(w) ** (1.0 / k_neg), np.abs(w) ** (1.0 / k_pos))
        return params.a + params.sigma * np.sign(w) * mag

    lo = np.full(u.shape, -(40.0**k_neg))
    hi = np.full(u.shape, 40.0**k_pos)
    # widen for u in the extreme tails
    while np.any(cdf(params, to_x(lo)) > u):
        lo = np.where(cdf(params, to_x(lo)) > u, 2.0 * lo, lo)
    while np.any(cdf(params, to_x(hi)) < u):
        hi = np.where(cdf(params, to_x(hi)) < u, 2.0 * hi, hi)

    active = np.ones(u.shape, dtype=bool)
    x = to_x(0.5 * (lo + hi))
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        x_lo, x_mid, x_hi = to_x(lo), to_x(mid), to_x(hi)
        # float resolution reached: the bracket cannot shrink further
        active &= (x_lo < x_mid) & (x_mid < x_hi)
        x = np.where(active, x_mid, x)
        c = cdf(params, x_mid)
        below = c < u
        lo = np.where(active & below, mid, lo)
        hi = np.where(active & ~below, mid, hi)
        narrow = (to_x(hi) - to_x(lo)) <= xtol * np.maximum(1.0, np.abs(x_mid))
        active &= ~(narrow & (np.abs(c - u) <= 1e-13))
        if not active.any():
            break
    x = np.where(np.abs(u - params.left_mass) <= 1e-15, params.a, x)
    return float(x) if x.ndim == 0 else x


def _resolve_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def log_standard_gamma(rng, shape, size):
    """Log of Gamma(shape, 1) variates by Marsaglia-Tsang squeeze/rejection.

    Shapes below one are boosted, ``G(s) = G(s + 1) * U**(1/s)``, and the
    result is kept in log form so that shapes near zero do not underflow.
    """
    if not shape > 0:
        raise ValueError("gamma shape must be positive")
    boost = shape < 1.0
    s = shape + 1.0 if boost else shape
    dd = s - 1.0 / 3.0
    cc = 1.0 / math.sqrt(9.0 * dd)
    out = np.empty(size)
    filled = 0
    while filled < size:
        m = max(16, int(1.1 * (size - filled)) + 8)
        z = rng.standard_normal(m)
        u = rng.random(m)
        v = (1.0 + cc * z) ** 3
        ok = v > 0
        z, u, v = z[ok], u[ok], v[ok]
        with np.errstate(divide="ignore"):
            logu = np.log(u)
        squeeze = u < 1.0 - 0.0331 * z**4
        accept = squeeze | (logu < 0.5 * z**2 + dd * (1.0 - v + np.log(v)))
        got = np.log(dd * v[accept])
        take = min(got.size, size - filled)
        out[filled:filled + take] = got[:take]
        filled += take
    if boost:
        out += np.log(rng.random(size)) / shape
    return out


def sample(params, seed, n):
    """Draw ``n`` i.i.d. variates.

    A side is chosen with probability ``right_mass``; the distance from the
    quasi-center is ``sigma * sqrt(2 G)`` with ``G ~ Gamma((alpha + 1) / 2)``
    for that side's exponent. ``seed`` may be an int or a numpy Generator.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = _resolve_rng(seed)
    right = rng.random(n) < params.right_mass
    dist = np.empty(n)
    for mask, alpha in ((right, params.alpha_pos), (~right, params.alpha_neg)):
        k = int(mask.sum())
        if k:
            log_g = log_standard_gamma(rng, 0.5 * (alpha + 1.0), k)
            dist[mask] = params.sigma * np.exp(0.5 * (math.log(2.0) + log_g))
    return params.a + np.where(right, dist, -dist)


def _side_moment(c, alpha, sigma, p):
    if c == 0:
        return 0.0
    if not alpha + p > -1:
        raise ValueError(f"moment of order {p} diverges for exponent {alpha}")
    return c * i_alpha(alpha + p, sigma) / (sigma * SQRT_2PI)


def moment(params, p, side="signed"):
    """Raw moment of order ``p`` about the quasi-center ``a``.

    ``side`` selects E[(xi-a)^p; xi > a] ("positive"), E[|xi-a|^p; xi < a]
    ("negative"), their sum E|xi-a|^p ("absolute") or, for integer ``p``,
    E[(xi-a)^p] ("signed").
    """
    if side not in MOMENT_SIDES:
        raise ValueError(f"side must be one of {MOMENT_SIDES}")
    plus = minus = 0.0
    if side != "negative":
        plus = _side_moment(params.c_pos, params.alpha_pos, params.sigma, p)
    if side != "positive":
        minus = _side_moment(params.c_neg, params.alpha_neg, params.sigma, p)
    if side == "positive":
        return plus
    if side == "negative":
        return minus
    if side == "absolute":
        return plus + minus
    if float(p) != int(p):
        raise ValueError("signed moments need an integer order")
    return plus - minus if int(p) % 2 else plus + minus


def mean(params):
    """E xi (about the origin)."""
    return params.a + moment(params, 1, "signed")


def second_moment(params):
    """E (xi - a)^2."""
    return moment(params, 2, "signed")


def tail_asymptote(params, y, side="upper"):
    """Leading-order tail probability at distance ``y`` from the center.

    Upper: ``c_pos * sigma / sqrt(2 pi) * y**(alpha_pos - 1) * exp(-y**2 / (2 sigma**2))``
    approximates P(xi - a > y); the lower side mirrors it with ``c_neg``.
    Compare with :func:`sf` / :func:`cdf` for the exact values.
    """
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    y = np.asarray(y, dtype=float)
    if np.any(~(y > 0)):
        raise ValueError("y must be positive")
    c, alpha = (params.c_pos, params.alpha_pos) if side == "upper" else (params.c_neg, params.alpha_neg)
    out = c * params.sigma / SQRT_2PI * y ** (alpha - 1.0) * np.exp(-0.5 * (y / params.sigma) ** 2)
    return float(out) if out.ndim == 0 else out


def params_to_json(params):
    return json.dumps(asdict(params))


def params_from_dict(obj, rtol=1e-9):
    keys = ("a", "alpha_neg", "alpha_pos", "sigma", "c_neg", "c_pos")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise ValueError(f"quasi-Gaussian parameters missing keys: {missing}")
    # bypass the strict constructor tolerance, then apply the load tolerance
    p = object.__new__(QuasiGaussianParams)
    for k in keys:
        object.__setattr__(p, k, float(obj[k]))
    p.validate(rtol=rtol)
    return p


def params_from_json(text, rtol=1e-9):
    """Parse parameters, re-checking normalization to relative ``rtol``."""
    return params_from_dict(json.loads(text), rtol=rtol)
