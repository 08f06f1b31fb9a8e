"""Monte-Carlo checks of the polar-independence characterization.

Two pieces: a contingency-table chi-square test of independence between
radius and angle, and an estimator of the local power-law degree ``mu`` of a
density at the origin (f(x) ~ |x|**mu).
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import multivar

__all__ = [
    "IndependenceReport",
    "RegularityEstimate",
    "VerificationSummary",
    "InsufficientDataError",
    "chi_square_independence",
    "verify_characterization",
    "estimate_regularity_degree",
]

CONSISTENT = "consistent-with-independence"
DEPENDENT = "dependence-detected"


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class IndependenceReport:
    statistic: float
    dof: int
    p_value: float
    n: int
    bins: tuple
    decision: str
    level: float

    def to_dict(self):
        d = asdict(self)
        d["bins"] = list(self.bins)
        return d

    def to_json(self):
        return json.dumps(self.to_dict())


def chi_square_independence(samples, radial_bins=8, angular_bins=8, level=0.05):
    """Chi-square test that radius and angle are independent.

    Radii are cut at their empirical quantiles into ``radial_bins``
    equal-count classes; angles in [0, 2 pi) into ``angular_bins`` equal-width
    sectors. The p-value is the upper tail of chi-square with
    ``(radial_bins - 1) * (angular_bins - 1)`` degrees of freedom.

    Parameters
    ----------
    samples : PolarSample or (rho, theta) pair of arrays
    radial_bins, angular_bins : int
        At least 2 each; need ``n >= 10 * radial_bins * angular_bins``.
    level : float
        Significance level used for ``decision``.
    """
    rho, theta = (np.asarray(v, dtype=float) for v in samples)
    n = rho.size
    if radial_bins < 2 or angular_bins < 2:
        raise ValueError("need at least 2 bins in each direction")
    if n < 10 * radial_bins * angular_bins:
        raise InsufficientDataError(
            f"{n} samples is below 10 per cell for a {radial_bins}x{angular_bins} grid"
        )
    edges = np.quantile(rho, np.arange(1, radial_bins) / radial_bins)
    r_idx = np.searchsorted(edges, rho, side="right")
    a_idx = np.minimum((theta * (angular_bins / (2.0 * math.pi))).astype(int), angular_bins - 1)

    table = np.zeros((radial_bins, angular_bins))
    np.add.at(table, (r_idx, a_idx), 1.0)
    row, col = table.sum(axis=1), table.sum(axis=0)
    if np.any(row == 0) or np.any(col == 0):
        raise ValueError("degenerate binning: an entire radial or angular bin is empty")
    expected = np.outer(row, col) / n
    statistic = float(np.sum((table - expected) ** 2 / expected))
    dof = (radial_bins - 1) * (angular_bins - 1)
    p_value = float(stats.chi2.sf(statistic, dof))
    decision = DEPENDENT if p_value < level else CONSISTENT
    return IndependenceReport(statistic, dof, p_value, n, (radial_bins, angular_bins), decision, level)


@dataclass
class VerificationSummary:
    rejection_rate: float
    rejections: int
    trials: int
    n: int
    level: float
    bins: tuple
    p_values: list = field(repr=False)

    def to_dict(self):
        d = asdict(self)
        d["bins"] = list(self.bins)
        return d


def verify_characterization(model, n, trials, seed=0, level=0.05, radial_bins=8, angular_bins=8, mix=None):
    """Rejection frequency of the independence test over repeated samples.

    Each trial draws ``n`` points from the two-dimensional ``model`` (optionally
    mapped through the 2x2 matrix ``mix``, e.g. to induce correlation),
    converts them to polar coordinates and applies
    :func:`chi_square_independence`. Trials use independent child seeds of
    ``seed``.
    """
    if model.dim != 2:
        raise ValueError("characterization harness needs a two-dimensional model")
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be positive")
    mix = None if mix is None else np.asarray(mix, dtype=float)
    p_values = []
    for child in multivar.seed_sequence(seed).spawn(trials):
        xy = multivar.sample_vector(model, child, n)
        if mix is not None:
            xy = xy @ mix.T
        polar = multivar.to_polar(xy[:, 0], xy[:, 1])
        report = chi_square_independence(polar, radial_bins, angular_bins, level)
        p_values.append(report.p_value)
    rejections = sum(p < level for p in p_values)
    return VerificationSummary(rejections / trials, rejections, trials, n, level, (radial_bins, angular_bins), p_values)


@dataclass(frozen=True)
class RegularityEstimate:
    mu_hat: float
    stderr: float
    window: float
    bandwidth: float
    n_local: int

    def to_dict(self):
        return asdict(self)


def _silverman(values):
    sd = np.std(values, ddof=1)
    q75, q25 = np.percentile(values, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34) if q75 > q25 else sd
    return 0.9 * spread * values.size ** (-0.2)


def estimate_regularity_degree(samples, window=None, bandwidth=None, n_grid=25, min_local=100):
    """Estimate ``mu`` in f(x) ~ |x|**mu near the origin.

    The density of ``log|x|`` is estimated with a Gaussian kernel (bandwidth
    in log units; Silverman's rule on the local log-magnitudes by default)
    and converted back to the symmetrized density of x on a log-spaced grid
    of |x| running from the 1% quantile of the local magnitudes up to
    ``window`` (default half the sample standard deviation). ``mu`` is the
    least-squares coefficient of log f against log|x|, with an x**2 term and
    an intercept as nuisance regressors; a Gaussian kernel turns a power law
    in |x| into an exponential in log|x| and leaves that slope unchanged.
    Exact zeros are dropped.
    """
    x = np.asarray(samples, dtype=float).ravel()
    x = x[x != 0]
    if x.size < 1000:
        raise InsufficientDataError("need at least 1000 nonzero samples")
    if window is None:
        window = 0.5 * float(np.std(x))
    if not window > 0:
        raise ValueError("window must be positive")
    mag = np.abs(x)
    local = mag[mag < window]
    if local.size < min_local:
        raise InsufficientDataError(f"only {local.size} samples inside the window, need {min_local}")
    logs = np.log(mag)
    if bandwidth is None:
        bandwidth = float(_silverman(np.log(local)))
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")

    grid = np.linspace(np.log(np.quantile(local, 0.01)), np.log(window), n_grid)
    dens_log = np.empty(n_grid)
    for i, g in enumerate(grid):
        dens_log[i] = np.sum(np.exp(-0.5 * ((g - logs) / bandwidth) ** 2))
    dens_log /= x.size * bandwidth * math.sqrt(2.0 * math.pi)
    # density of |x| at e^g is dens_log / e^g; symmetrizing halves it (constant, absorbed)
    log_f = np.log(dens_log) - grid

    design = np.column_stack([grid, np.exp(2.0 * grid), np.ones(n_grid)])
    coef, _, _, _ = np.linalg.lstsq(design, log_f, rcond=None)
    resid = log_f - design @ coef
    dof = n_grid - design.shape[1]
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(design.T @ design)
    mu_hat = max(float(coef[0]), -1.0 + 1e-9)
    return RegularityEstimate(mu_hat, math.sqrt(cov[0, 0]), float(window), float(bandwidth), int(local.size))
