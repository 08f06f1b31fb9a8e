"""Product-form quasi-Gaussian vectors and polar/spherical coordinates."""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import qgauss
from .qgauss import QuasiGaussianParams

__all__ = [
    "ProductQuasiGaussian",
    "PolarSample",
    "DegeneratePointError",
    "joint_pdf",
    "joint_logpdf",
    "sample_vector",
    "to_polar",
    "from_polar",
    "polar_rect_probability",
    "to_spherical",
    "from_spherical",
    "write_csv",
    "read_csv",
]

TWO_PI = 2.0 * math.pi


class DegeneratePointError(ValueError):
    """Angle requested for the origin, where it is undefined."""


@dataclass(frozen=True)
class ProductQuasiGaussian:
    """Vector with independent quasi-Gaussian coordinates.

    ``shared_sigma=True`` asserts that every coordinate uses the same
    quasi-standard; it is checked, never inferred.
    """

    coords: tuple
    shared_sigma: bool = False

    def __post_init__(self):
        coords = tuple(self.coords)
        if not coords:
            raise ValueError("need at least one coordinate")
        if not all(isinstance(c, QuasiGaussianParams) for c in coords):
            raise TypeError("coords must be QuasiGaussianParams")
        object.__setattr__(self, "coords", coords)
        if self.shared_sigma:
            s0 = coords[0].sigma
            if any(abs(c.sigma - s0) > 1e-12 * s0 for c in coords):
                raise ValueError("shared_sigma set but coordinate sigmas differ")

    @property
    def dim(self):
        return len(self.coords)

    @classmethod
    def iid(cls, params, d):
        return cls((params,) * d, shared_sigma=True)


def _as_rows(model, x):
    x = np.asarray(x, dtype=float)
    rows = x.reshape(1, -1) if x.ndim == 1 else x
    if rows.ndim != 2 or rows.shape[1] != model.dim:
        raise ValueError(f"expected points of dimension {model.dim}, got shape {x.shape}")
    return x.ndim == 1, rows


def joint_logpdf(model, x):
    single, rows = _as_rows(model, x)
    out = np.zeros(rows.shape[0])
    for j, params in enumerate(model.coords):
        out += qgauss.logpdf(params, rows[:, j])
    return float(out[0]) if single else out


def joint_pdf(model, x):
    """Product of coordinate densities at a point (length d) or rows (n x d)."""
    out = np.exp(joint_logpdf(model, x))
    return float(out) if np.ndim(out) == 0 else out


def seed_sequence(seed):
    """Coerce an int, SeedSequence or Generator into a SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(2**63)))
    return np.random.SeedSequence(seed)


def sample_vector(model, seed, n):
    """n x d matrix of i.i.d. rows; columns use independent child streams."""
    if n < 0:
        raise ValueError("n must be non-negative")
    children = seed_sequence(seed).spawn(model.dim)
    cols = [qgauss.sample(p, np.random.default_rng(ss), n) for p, ss in zip(model.coords, children)]
    return np.column_stack(cols) if n else np.empty((0, model.dim))


class PolarSample(NamedTuple):
    rho: np.ndarray
    theta: np.ndarray


def to_polar(x, y):
    """Radius and four-quadrant angle in [0, 2 pi).

    Works elementwise on arrays. Raises :class:`DegeneratePointError` if any
    point is the origin.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any((x == 0) & (y == 0)):
        raise DegeneratePointError("polar angle undefined at the origin")
    rho = np.hypot(x, y)
    theta = np.mod(np.arctan2(y, x), TWO_PI)
    # mod of a tiny negative angle rounds up to exactly 2 pi
    theta = np.where(theta >= TWO_PI, 0.0, theta)
    if rho.ndim == 0:
        return PolarSample(float(rho), float(theta))
    return PolarSample(rho, theta)


def from_polar(rho, theta):
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return rho * np.cos(theta), rho * np.sin(theta)


def polar_rect_probability(sigma, r, phi):
    """P(rho < r, theta < phi) for two i.i.d. N(0, sigma^2) coordinates.

    ``(phi / 2 pi) * (1 - exp(-r^2 / (2 sigma^2)))``; ``r`` may be ``inf``.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not r > 0:
        raise ValueError("r must be positive")
    if not 0 < phi <= TWO_PI:
        raise ValueError("phi must lie in (0, 2 pi]")
    return phi / TWO_PI * -math.expm1(-0.5 * (r / sigma) ** 2)


def to_spherical(x):
    """Hyperspherical coordinates of a nonzero vector (d >= 2).

    Returns ``(radius, angles)`` where ``angles[:-1]`` lie in [0, pi] and the
    last angle in [0, 2 pi), with
    ``x_1 = r cos t_1``, ``x_k = r sin t_1 ... sin t_{k-1} cos t_k`` and
    ``x_d = r sin t_1 ... sin t_{d-1}``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need a vector of dimension >= 2")
    radius = float(np.linalg.norm(x))
    if radius == 0:
        raise DegeneratePointError("spherical angles undefined at the origin")
    d = x.size
    angles = np.empty(d - 1)
    # norms of the trailing sub-vectors
    tail = np.sqrt(np.cumsum(x[::-1] ** 2)[::-1])
    for k in range(d - 2):
        angles[k] = math.atan2(tail[k + 1], x[k])
    last = math.atan2(x[-1], x[-2]) % TWO_PI
    angles[-1] = 0.0 if last >= TWO_PI else last
    return radius, angles


def from_spherical(radius, angles):
    angles = np.asarray(angles, dtype=float)
    d = angles.size + 1
    x = np.empty(d)
    s = radius
    for k in range(d - 1):
        x[k] = s * math.cos(angles[k])
        s *= math.sin(angles[k])
    x[-1] = s
    return x


def write_csv(path, data):
    """Write an n x d matrix with header ``x1,...,xd`` and 17 significant digits."""
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data.reshape(-1, 1)
    header = ",".join(f"x{j + 1}" for j in range(data.shape[1]))
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in data:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_csv(path, columns=None):
    """Read a header-row CSV into an n x d float matrix.

    ``columns`` optionally selects header names, in order.
    """
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    if columns is not None:
        missing = [c for c in columns if c not in header]
        if missing:
            raise ValueError(f"columns not in CSV header: {missing}")
        data = data[:, [header.index(c) for c in columns]]
    return data
