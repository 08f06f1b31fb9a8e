"""Weighted quasi-Gaussian mixtures with an optional point mass, and EM fitting."""

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.special import logsumexp

from . import multivar, qgauss
from .multivar import ProductQuasiGaussian
from .qgauss import QuasiGaussianParams

__all__ = [
    "Atom",
    "MixtureModel",
    "EmConfig",
    "FitResult",
    "DegenerateFitError",
    "ZeroDensityWarning",
    "mixture_pdf",
    "mixture_logpdf",
    "sample_mixture",
    "log_likelihood",
    "responsibilities",
    "detect_atom",
    "fit_em",
    "model_to_dict",
    "model_from_dict",
    "model_to_json",
    "model_from_json",
]

LOG2 = math.log(2.0)


class DegenerateFitError(ArithmeticError):
    """EM left no usable component."""


class ZeroDensityWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class Atom:
    """Point mass ``weight`` at ``location``."""

    weight: float
    location: tuple

    def __post_init__(self):
        object.__setattr__(self, "weight", float(self.weight))
        object.__setattr__(self, "location", tuple(float(v) for v in np.atleast_1d(self.location)))


@dataclass(frozen=True)
class MixtureModel:
    """Sum of ``weights[k] * components[k]`` plus an optional :class:`Atom`.

    Component weights and the atom weight must be positive and add up to one.
    """

    weights: tuple
    components: tuple
    atom: Atom = None

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        comps = tuple(self.components)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", comps)
        if len(weights) != len(comps) or not comps:
            raise ValueError("need one weight per component and at least one component")
        if any(not w > 0 for w in weights):
            raise ValueError("component weights must be positive")
        dims = {c.dim for c in comps}
        if len(dims) != 1:
            raise ValueError("components differ in dimension")
        total = sum(weights)
        if self.atom is not None:
            if not self.atom.weight > 0:
                raise ValueError("atom weight must be positive")
            if len(self.atom.location) != self.dim:
                raise ValueError("atom location has the wrong dimension")
            total += self.atom.weight
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights add up to {total!r}, not 1")

    @property
    def dim(self):
        return self.components[0].dim

    @property
    def atom_weight(self):
        return 0.0 if self.atom is None else self.atom.weight


def _rows(model, x):
    x = np.asarray(x, dtype=float)
    rows = x.reshape(1, -1) if x.ndim == 1 else x
    if model.dim == 1 and x.ndim == 1 and x.size != 1:
        rows = x.reshape(-1, 1)
        return False, rows
    if rows.ndim != 2 or rows.shape[1] != model.dim:
        raise ValueError(f"expected points of dimension {model.dim}, got shape {x.shape}")
    return x.ndim == 1, rows


def _component_logpdfs(model, rows):
    return np.column_stack(
        [math.log(w) + multivar.joint_logpdf(c, rows) for w, c in zip(model.weights, model.components)]
    )


def mixture_logpdf(model, x):
    single, rows = _rows(model, x)
    out = logsumexp(_component_logpdfs(model, rows), axis=1)
    return float(out[0]) if single else out


def mixture_pdf(model, x):
    """Density of the continuous part, ``sum_k W_k G_k(x)``.

    The atom carries probability, not density, and is not included. Accepts a
    single point (length d) or an n x d matrix; for d = 1 a flat array is
    read as n points.
    """
    out = np.exp(mixture_logpdf(model, x))
    return float(out) if np.ndim(out) == 0 else out


def sample_mixture(model, seed, n, return_labels=False):
    """n x d draws; atom rows are exactly the atom location.

    With ``return_labels`` also returns the source of each row: -1 for the
    atom, otherwise the component index.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    ss = multivar.seed_sequence(seed).spawn(len(model.components) + 1)
    probs = np.array([model.atom_weight, *model.weights])
    labels = np.random.default_rng(ss[0]).choice(probs.size, size=n, p=probs / probs.sum()) - 1
    out = np.empty((n, model.dim))
    if model.atom is not None:
        out[labels == -1] = model.atom.location
    for k, comp in enumerate(model.components):
        mask = labels == k
        out[mask] = multivar.sample_vector(comp, ss[k + 1], int(mask.sum()))
    return (out, labels) if return_labels else out


def _atom_mask(model, rows):
    if model.atom is None:
        return np.zeros(rows.shape[0], dtype=bool)
    return np.all(rows == np.asarray(model.atom.location), axis=1)


def log_likelihood(model, data):
    """Total log-likelihood of the rows of ``data``.

    Rows equal to the atom location contribute ``log W_0``; the others the
    log of the continuous density. If some row has zero density the result is
    ``-inf`` and a :class:`ZeroDensityWarning` names the offending rows.
    """
    data = np.asarray(data, dtype=float)
    if data.size == 0:
        return 0.0
    _, rows = _rows(model, data)
    on_atom = _atom_mask(model, rows)
    total = on_atom.sum() * math.log(model.atom_weight) if on_atom.any() else 0.0
    if (~on_atom).any():
        lp = mixture_logpdf(model, rows[~on_atom])
        bad = np.flatnonzero(~on_atom)[np.isneginf(lp)]
        if bad.size:
            warnings.warn(f"zero density at row(s) {bad.tolist()}", ZeroDensityWarning, stacklevel=2)
            return -math.inf
        total += float(np.sum(lp))
    return float(total)


def responsibilities(model, data):
    """Posterior component probabilities for rows off the atom (n x N)."""
    _, rows = _rows(model, data)
    lp = _component_logpdfs(model, rows)
    return np.exp(lp - logsumexp(lp, axis=1, keepdims=True))


# ---------------------------------------------------------------------------
# fitting


@dataclass
class EmConfig:
    """Settings for :func:`fit_em`.

    ``alpha_bounds`` limits both exponents during fitting; the lower bound
    may go down to -0.99 but negative exponents make the likelihood
    unbounded at data points. ``right_mass_bounds`` can pin the side balance
    (e.g. ``(0.5, 0.5)`` with ``alpha_bounds=(0, 0)`` gives plain Gaussian
    components). ``shared_sigma`` forces one quasi-standard across the
    coordinates of each component.
    """

    max_iters: int = 300
    loglik_tol: float = 1e-7
    alpha_bounds: tuple = (0.0, 8.0)
    right_mass_bounds: tuple = (0.0, 1.0)
    restarts: int = 3
    seed: int = 0
    shared_sigma: bool = False
    center_candidates: int = 15
    kmeans_iters: int = 10

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.loglik_tol > 0:
            raise ValueError("loglik_tol must be positive")
        lo, hi = self.alpha_bounds
        if not (-0.99 <= lo <= hi):
            raise ValueError("alpha_bounds must satisfy -0.99 <= lo <= hi")
        lo, hi = self.right_mass_bounds
        if not (0.0 <= lo <= hi <= 1.0):
            raise ValueError("right_mass_bounds must lie in [0, 1]")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


@dataclass
class FitResult:
    model: MixtureModel
    log_likelihood: float
    trace: list
    n_iter: int
    converged: bool
    pruned: list = field(default_factory=list)
    restart_log_likelihoods: list = field(default_factory=list)

    def diagnostics(self):
        return {
            "log_likelihood": self.log_likelihood,
            "trace": list(self.trace),
            "n_iter": self.n_iter,
            "converged": self.converged,
            "pruned": list(self.pruned),
            "restart_log_likelihoods": list(self.restart_log_likelihoods),
        }


def detect_atom(data, min_count=None):
    """Most repeated row if it occurs at least ``max(5, 0.5% of n)`` times.

    Returns ``(location, count)`` or ``None``.
    """
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    if min_count is None:
        min_count = max(5, math.ceil(0.005 * n))
    if n == 0:
        return None
    uniq, counts = np.unique(data, axis=0, return_counts=True)
    k = int(np.argmax(counts))
    if counts[k] < min_count:
        return None
    return uniq[k], int(counts[k])


def _log_i(alpha, log_sigma):
    return 0.5 * (alpha - 1.0) * LOG2 + (alpha + 1.0) * log_sigma + math.lgamma(0.5 * (alpha + 1.0))


class _CoordStats:
    """Weighted sufficient statistics of one coordinate about a trial center."""

    __slots__ = ("w_left", "w_right", "s_left", "s_right", "sq", "w_center")

    def __init__(self, x, w, a):
        d = x - a
        right, left = d > 0, d < 0
        self.w_right = float(w[right].sum())
        self.w_left = float(w[left].sum())
        self.w_center = float(w[d == 0].sum())
        self.s_right = float(w[right] @ np.log(d[right])) if self.w_right > 0 else 0.0
        self.s_left = float(w[left] @ np.log(-d[left])) if self.w_left > 0 else 0.0
        self.sq = float(w @ (d * d))


def _side_term(w_side, s_side, alpha, log_sigma, mass):
    if w_side == 0:
        return 0.0
    if mass <= 0:
        return -math.inf
    return w_side * (math.log(mass) - _log_i(alpha, log_sigma)) + alpha * s_side


def _objective(st, alpha_neg, alpha_pos, sigma, mass):
    """Weighted log-likelihood of one coordinate (additive constants kept)."""
    log_sigma = math.log(sigma)
    val = (
        _side_term(st.w_right, st.s_right, alpha_pos, log_sigma, mass)
        + _side_term(st.w_left, st.s_left, alpha_neg, log_sigma, 1.0 - mass)
        - st.sq / (2.0 * sigma * sigma)
    )
    if st.w_center > 0:
        # density at the center: mean of the one-sided limits mass / I(alpha, sigma) (alpha = 0) or 0 / inf
        lim = 0.0
        for m, alpha in ((1.0 - mass, alpha_neg), (mass, alpha_pos)):
            if m > 0 and alpha < 0:
                lim = math.inf
            elif m > 0 and alpha == 0:
                lim += 0.5 * m / math.exp(_log_i(0.0, log_sigma))
        val += st.w_center * (math.log(lim) if lim > 0 else -math.inf)
    return val


def _profile_sigma(st, alpha_neg, alpha_pos):
    denom = st.w_left * (alpha_neg + 1.0) + st.w_right * (alpha_pos + 1.0)
    if denom > 0 and st.sq > 0:
        return math.sqrt(st.sq / denom)
    return None


def _fit_given_center(st, start, cfg, fixed_sigma=None):
    """Maximize over (alpha_neg, alpha_pos, sigma, right_mass) at a fixed center.

    right_mass and (unless ``fixed_sigma``) sigma have closed-form maximizers;
    the exponents are found by a bounded Powell search, i.e. Brent line
    searches along coordinate and conjugate directions.
    """
    alpha_neg, alpha_pos, sigma, _ = start
    lo_m, hi_m = cfg.right_mass_bounds
    w_tot = st.w_left + st.w_right
    mass = min(max(st.w_right / w_tot if w_tot > 0 else 0.5, lo_m), hi_m)
    lo, hi = cfg.alpha_bounds
    free = [i for i, w in enumerate((st.w_left, st.w_right)) if w > 0 and hi > lo]
    alphas = [min(max(alpha_neg, lo), hi), min(max(alpha_pos, lo), hi)]

    def sigma_for(a_neg, a_pos):
        if fixed_sigma is not None:
            return fixed_sigma
        return _profile_sigma(st, a_neg, a_pos) or sigma

    def value(a_neg, a_pos):
        return _objective(st, a_neg, a_pos, sigma_for(a_neg, a_pos), mass)

    best = value(*alphas)
    if free:

        def neg(v):
            trial = list(alphas)
            for i, vi in zip(free, v):
                trial[i] = vi
            out = -value(*trial)
            return out if math.isfinite(out) else 1e300

        x0 = np.array([alphas[i] for i in free])
        res = minimize(neg, x0, method="Powell", bounds=[(lo, hi)] * len(free), options={"xtol": 1e-9, "ftol": 1e-13})
        if -res.fun > best:
            for i, vi in zip(free, np.atleast_1d(res.x)):
                alphas[i] = float(vi)
            best = -res.fun
    return best, (alphas[0], alphas[1], sigma_for(*alphas), mass)


def _weighted_quantiles(x, w, probs):
    order = np.argsort(x, kind="stable")
    xs, ws = x[order], w[order]
    cum = np.cumsum(ws) - 0.5 * ws
    cum /= ws.sum()
    return np.interp(probs, cum, xs)


def _update_coordinate(x, w, params, cfg, fixed_sigma=None, scan=True):
    """One M-step for a single coordinate of one component.

    The center is chosen by profiling the other parameters out: a scan over
    weighted quantiles (when ``scan``) followed by a bounded Brent search
    between the neighbours of the best point, or a local search around the
    current center otherwise. Returns parameters that never lower the
    weighted log-likelihood.
    """
    start = (params.alpha_neg, params.alpha_pos, fixed_sigma or params.sigma, params.right_mass)
    cur_val = _objective(_CoordStats(x, w, params.a), *start[:3], params.right_mass)

    cache = {}

    def profile(a):
        if a not in cache:
            cache[a] = _fit_given_center(_CoordStats(x, w, a), start, cfg, fixed_sigma)
        return cache[a]

    if scan:
        probs = np.linspace(0.05, 0.95, cfg.center_candidates)
        cands = np.unique(np.append(_weighted_quantiles(x, w, probs), params.a))
        vals = np.array([profile(float(a))[0] for a in cands])
        i = int(np.argmax(vals))
        lo, hi = cands[max(i - 1, 0)], cands[min(i + 1, cands.size - 1)]
        best_a, best_val = float(cands[i]), vals[i]
    else:
        half = 0.25 * params.sigma
        lo, hi = params.a - half, params.a + half
        best_a, best_val = params.a, profile(params.a)[0]
    if hi > lo:
        scale = max(abs(lo), abs(hi), hi - lo)
        res = minimize_scalar(
            lambda a: -profile(float(a))[0], bounds=(lo, hi), method="bounded", options={"xatol": 1e-11 * scale}
        )
        if -res.fun > best_val:
            best_a = float(res.x)
    best_val, (alpha_neg, alpha_pos, sigma, mass) = profile(best_a)
    if not best_val > cur_val:
        return params
    return qgauss.make_params(best_a, alpha_neg, alpha_pos, sigma, mass)


def _shared_sigma(xs, w, coords):
    """Closed-form common sigma given centers and exponents."""
    sq = denom = 0.0
    for x, p in zip(xs, coords):
        st = _CoordStats(x, w, p.a)
        sq += st.sq
        denom += st.w_left * (p.alpha_neg + 1.0) + st.w_right * (p.alpha_pos + 1.0)
    return math.sqrt(sq / denom) if denom > 0 and sq > 0 else coords[0].sigma


def _m_step_component(data, w, comp, cfg, scan=True):
    coords = list(comp.coords)
    if cfg.shared_sigma:
        sigma = coords[0].sigma
        coords = [
            _update_coordinate(data[:, j], w, p, cfg, fixed_sigma=sigma, scan=scan) for j, p in enumerate(coords)
        ]
        new_sigma = _shared_sigma([data[:, j] for j in range(data.shape[1])], w, coords)
        old = _component_objective(data, w, coords)
        trial = [qgauss.make_params(p.a, p.alpha_neg, p.alpha_pos, new_sigma, p.right_mass) for p in coords]
        if _component_objective(data, w, trial) > old:
            coords = trial
        return ProductQuasiGaussian(tuple(coords), shared_sigma=True)
    coords = [_update_coordinate(data[:, j], w, p, cfg, scan=scan) for j, p in enumerate(coords)]
    return ProductQuasiGaussian(tuple(coords))


def _component_objective(data, w, coords):
    return sum(
        _objective(_CoordStats(data[:, j], w, p.a), p.alpha_neg, p.alpha_pos, p.sigma, p.right_mass)
        for j, p in enumerate(coords)
    )


def _kmeans_init(data, k, rng, iters):
    n = data.shape[0]
    centers = [data[rng.integers(n)]]
    for _ in range(1, k):
        d2 = np.min([np.sum((data - c) ** 2, axis=1) for c in centers], axis=0)
        total = d2.sum()
        idx = rng.choice(n, p=d2 / total) if total > 0 else rng.integers(n)
        centers.append(data[idx])
    centers = np.array(centers)
    labels = np.zeros(n, dtype=int)
    for _ in range(iters):
        labels = np.argmin(((data[:, None, :] - centers[None]) ** 2).sum(axis=2), axis=1)
        for j in range(k):
            if np.any(labels == j):
                centers[j] = data[labels == j].mean(axis=0)
    return centers, labels


def _initial_model(data, k, rng, cfg, atom, scale):
    centers, labels = _kmeans_init(data, k, rng, cfg.kmeans_iters)
    alpha0 = min(max(0.0, cfg.alpha_bounds[0]), cfg.alpha_bounds[1])
    mass0 = min(max(0.5, cfg.right_mass_bounds[0]), cfg.right_mass_bounds[1])
    cont = 1.0 - (atom.weight if atom else 0.0)
    comps, weights = [], []
    for j in range(k):
        members = data[labels == j]
        frac = max(members.shape[0], 1) / data.shape[0]
        spread = members.std(axis=0) if members.shape[0] > 1 else scale
        spread = np.where(spread > 1e-3 * scale, spread, scale)
        if cfg.shared_sigma:
            spread = np.full(spread.shape, float(np.mean(spread)))
        coords = tuple(
            qgauss.make_params(centers[j, i], alpha0, alpha0, float(spread[i]), mass0) for i in range(data.shape[1])
        )
        comps.append(ProductQuasiGaussian(coords, shared_sigma=cfg.shared_sigma))
        weights.append(frac)
    weights = np.array(weights) / np.sum(weights) * cont
    return MixtureModel(tuple(weights), tuple(comps), atom)


def _total_loglik(model, cont_rows, n_atom):
    lp = logsumexp(_component_logpdfs(model, cont_rows), axis=1)
    ll = float(np.sum(lp))
    if n_atom:
        ll += n_atom * math.log(model.atom.weight)
    return ll


def _run_em(data, n_atom, model, cfg, scale):
    trace = [_total_loglik(model, data, n_atom)]
    pruned = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        lp = _component_logpdfs(model, data)
        resp = np.exp(lp - logsumexp(lp, axis=1, keepdims=True))
        cont = 1.0 - model.atom_weight
        nk = resp.sum(axis=0)
        # a full center scan early on and periodically; local refinement otherwise
        scan = it <= 3 or it % 10 == 0
        weights = nk / data.shape[0] * cont
        comps = []
        for k, comp in enumerate(model.components):
            comps.append(_m_step_component(data, resp[:, k], comp, cfg, scan) if nk[k] > 0 else comp)

        keep = []
        for k, (w, c) in enumerate(zip(weights, comps)):
            tiny_sigma = any(p.sigma < 1e-8 * s for p, s in zip(c.coords, scale))
            if w < 1e-6 or tiny_sigma:
                pruned.append({"iteration": it, "component": k, "weight": float(w), "reason": "sigma" if tiny_sigma else "weight"})
            else:
                keep.append(k)
        if not keep:
            raise DegenerateFitError("every mixture component degenerated")
        if len(keep) < len(comps):
            kept_w = np.array([weights[k] for k in keep])
            weights = kept_w / kept_w.sum() * cont
            comps = [comps[k] for k in keep]
        model = MixtureModel(tuple(weights), tuple(comps), model.atom)
        trace.append(_total_loglik(model, data, n_atom))
        if abs(trace[-1] - trace[-2]) < cfg.loglik_tol:
            converged = True
            break
    return model, trace, it, converged, pruned


def fit_em(data, n_components, atom_policy="none", config=None):
    """Fit a quasi-Gaussian mixture by expectation-maximization.

    Parameters
    ----------
    data : array_like, shape (n, d)
    n_components : int
    atom_policy : {"none", "detect-duplicates"}
        With "detect-duplicates" the most repeated row (see :func:`detect_atom`)
        becomes a point mass with its empirical share as weight, and those rows
        are left out of the continuous fit.
    config : EmConfig, optional

    Returns
    -------
    FitResult
        The best of ``config.restarts`` runs by final log-likelihood.
    """
    cfg = config or EmConfig()
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data.reshape(-1, 1)
    n, d = data.shape
    if atom_policy not in ("none", "detect-duplicates"):
        raise ValueError("atom_policy must be 'none' or 'detect-duplicates'")
    if n_components < 1:
        raise ValueError("need at least one component")
    if n < 10 * n_components * d:
        raise ValueError(f"need at least {10 * n_components * d} rows, got {n}")

    atom, n_atom, cont_rows = None, 0, data
    if atom_policy == "detect-duplicates":
        found = detect_atom(data)
        if found is not None:
            loc, n_atom = found
            atom = Atom(n_atom / n, tuple(loc))
            cont_rows = data[~np.all(data == loc, axis=1)]
    scale = cont_rows.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)

    best = None
    finals = []
    for child in np.random.SeedSequence(cfg.seed).spawn(cfg.restarts):
        rng = np.random.default_rng(child)
        init = _initial_model(cont_rows, n_components, rng, cfg, atom, scale)
        model, trace, iters, converged, pruned = _run_em(cont_rows, n_atom, init, cfg, scale)
        finals.append(trace[-1])
        if best is None or trace[-1] > best.log_likelihood:
            best = FitResult(model, trace[-1], trace, iters, converged, pruned)
    best.restart_log_likelihoods = finals
    return best


# ---------------------------------------------------------------------------
# serialization


def model_to_dict(model):
    return {
        "atom": None
        if model.atom is None
        else {"w0": model.atom.weight, "a0": list(model.atom.location)},
        "components": [
            {"weight": w, "coords": [vars(p).copy() for p in c.coords]}
            for w, c in zip(model.weights, model.components)
        ],
    }


def model_from_dict(obj, rtol=1e-9):
    atom = None
    if obj.get("atom") is not None:
        atom = Atom(obj["atom"]["w0"], tuple(obj["atom"]["a0"]))
    weights, comps = [], []
    for entry in obj["components"]:
        weights.append(float(entry["weight"]))
        comps.append(ProductQuasiGaussian(tuple(qgauss.params_from_dict(p, rtol) for p in entry["coords"])))
    return MixtureModel(tuple(weights), tuple(comps), atom)


def model_to_json(model):
    return json.dumps(model_to_dict(model), indent=2)


def model_from_json(text, rtol=1e-9):
    return model_from_dict(json.loads(text), rtol)


def single(params):
    """Wrap univariate parameters as a one-component, one-dimensional mixture."""
    if isinstance(params, QuasiGaussianParams):
        params = ProductQuasiGaussian((params,))
    return MixtureModel((1.0,), (params,))
