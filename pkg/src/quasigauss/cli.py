"""Command-line front end.

Subcommands: sample, pdf, cdf, moments, fit, verify, degree. Bad input exits
with status 1 and one JSON line on stderr; numerical failure (e.g. every EM
component degenerating) exits with status 2.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import characterize, mixture, multivar, qgauss
from .multivar import ProductQuasiGaussian

DEFAULT_SEED = 20240607


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(v):
    return f"{v:.17g}"


def _load_model(path):
    """Univariate parameter JSON or mixture JSON, as a MixtureModel."""
    with open(path) as fh:
        obj = json.load(fh)
    if "components" in obj:
        return mixture.model_from_dict(obj)
    return mixture.single(qgauss.params_from_dict(obj))


def _load_params(path):
    model = _load_model(path)
    if model.dim != 1 or len(model.components) != 1 or model.atom is not None:
        raise UsageError("this command needs a univariate quasi-Gaussian model")
    return model.components[0].coords[0]


def _points(args, dim):
    if args.data:
        cols = [args.column] if args.column else None
        pts = multivar.read_csv(args.data, cols)
    elif args.grid:
        lo, hi, n = args.grid
        if dim != 1:
            raise UsageError("--grid only applies to one-dimensional models")
        pts = np.linspace(float(lo), float(hi), int(n)).reshape(-1, 1)
    else:
        raise UsageError("give --data or --grid")
    if pts.shape[1] != dim:
        raise UsageError(f"points have {pts.shape[1]} columns, model has dimension {dim}")
    return pts


def _write_text(path, text):
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_tsv(path, pts, values):
    names = ["x"] if pts.shape[1] == 1 else [f"x{j + 1}" for j in range(pts.shape[1])]
    lines = ["\t".join(names + ["value"])]
    for row, v in zip(pts, values):
        lines.append("\t".join([_fmt(c) for c in row] + [_fmt(v)]))
    _write_text(path, "\n".join(lines) + "\n")


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_sample(args):
    model = _load_model(args.model)
    data = mixture.sample_mixture(model, args.seed, args.n)
    if args.out:
        multivar.write_csv(args.out, data)
    else:
        header = ",".join(f"x{j + 1}" for j in range(model.dim))
        rows = [",".join(_fmt(v) for v in row) for row in data]
        sys.stdout.write("\n".join([header, *rows]) + "\n")


def cmd_pdf(args):
    model = _load_model(args.model)
    pts = _points(args, model.dim)
    _write_tsv(args.out, pts, mixture.mixture_pdf(model, pts))


def cmd_cdf(args):
    model = _load_model(args.model)
    if model.dim != 1:
        raise UsageError("cdf needs a one-dimensional model")
    pts = _points(args, 1)
    x = pts[:, 0]
    values = np.zeros(x.size)
    for w, comp in zip(model.weights, model.components):
        values += w * qgauss.cdf(comp.coords[0], x)
    if model.atom is not None:
        values += model.atom.weight * (x >= model.atom.location[0])
    _write_tsv(args.out, pts, values)


def cmd_moments(args):
    params = _load_params(args.model)
    table = {}
    for p in args.orders:
        entry = {}
        for side in qgauss.MOMENT_SIDES:
            if side == "signed" and p != int(p):
                continue
            try:
                entry[side] = qgauss.moment(params, p, side)
            except ValueError:
                entry[side] = None
        table[_fmt(p)] = entry
    out = {
        "about": "quasi-center",
        "a": params.a,
        "mean": qgauss.mean(params),
        "second_moment": qgauss.second_moment(params),
        "left_mass": params.left_mass,
        "right_mass": params.right_mass,
        "moments": table,
    }
    _write_text(args.out, _dump(out))


def cmd_fit(args):
    data = multivar.read_csv(args.data)
    cfg = mixture.EmConfig(
        max_iters=args.max_iters,
        loglik_tol=args.tol,
        alpha_bounds=tuple(args.alpha_bounds),
        right_mass_bounds=tuple(args.right_mass_bounds),
        restarts=args.restarts,
        seed=args.seed,
        shared_sigma=args.shared_sigma,
    )
    result = mixture.fit_em(data, args.components, args.atom, cfg)
    _write_text(args.out, mixture.model_to_json(result.model) + "\n")
    if args.diagnostics:
        _write_text(args.diagnostics, _dump(result.diagnostics()))
    if result.pruned:
        print(json.dumps({"warning": "components pruned", "pruned": result.pruned}), file=sys.stderr)


def _verify_model(args):
    coords = []
    for alpha, sigma, mass in ((args.alpha1, args.sigma1, args.right_mass1), (args.alpha2, args.sigma2, args.right_mass2)):
        coords.append(qgauss.make_params(0.0, alpha[0], alpha[1], sigma, mass))
    return ProductQuasiGaussian(tuple(coords))


def cmd_verify(args):
    model = _verify_model(args)
    mix = None
    if args.corr:
        if not -1 < args.corr < 1:
            raise UsageError("--corr must lie in (-1, 1)")
        mix = [[1.0, 0.0], [args.corr, math.sqrt(1.0 - args.corr**2)]]
    summary = characterize.verify_characterization(
        model, args.n, args.trials, seed=args.seed, level=args.level,
        radial_bins=args.bins[0], angular_bins=args.bins[1], mix=mix,
    )
    out = summary.to_dict()
    out["model"] = [vars(p).copy() for p in model.coords]
    out["mix"] = mix
    _write_text(args.out, _dump(out))


def cmd_degree(args):
    cols = [args.column] if args.column else None
    data = multivar.read_csv(args.data, cols)
    if data.shape[1] != 1:
        raise UsageError("degree needs a single column; use --column")
    est = characterize.estimate_regularity_degree(data[:, 0] - args.center, args.window, args.bandwidth)
    _write_text(args.out, _dump(est.to_dict()))


def build_parser():
    parser = _Parser(prog="quasigauss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed=False):
        p.add_argument("--out", help="output path (default: stdout)")
        if seed:
            p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = sub.add_parser("sample", help="draw a sample to CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    common(p, seed=True)
    p.set_defaults(func=cmd_sample)

    for name, func in (("pdf", cmd_pdf), ("cdf", cmd_cdf)):
        p = sub.add_parser(name, help=f"evaluate the {name} to TSV")
        p.add_argument("--model", required=True)
        p.add_argument("--data", help="CSV of evaluation points")
        p.add_argument("--column", help="CSV column to use")
        p.add_argument("--grid", nargs=3, metavar=("LO", "HI", "N"), help="equispaced grid")
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("moments", help="moments about the quasi-center as JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--orders", type=float, nargs="+", default=[1.0, 2.0, 3.0, 4.0])
    common(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("fit", help="fit a mixture by EM")
    p.add_argument("--data", required=True)
    p.add_argument("--components", type=int, default=1)
    p.add_argument("--atom", choices=["none", "detect-duplicates"], default="none")
    p.add_argument("--alpha-bounds", type=float, nargs=2, default=[0.0, 8.0])
    p.add_argument("--right-mass-bounds", type=float, nargs=2, default=[0.0, 1.0])
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--max-iters", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--shared-sigma", action="store_true")
    p.add_argument("--diagnostics", help="path for the fit diagnostics JSON")
    common(p, seed=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify", help="Monte-Carlo polar-independence check")
    p.add_argument("--sigma1", type=float, default=1.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--alpha1", type=float, nargs=2, default=[0.0, 0.0], metavar=("NEG", "POS"))
    p.add_argument("--alpha2", type=float, nargs=2, default=[0.0, 0.0], metavar=("NEG", "POS"))
    p.add_argument("--right-mass1", type=float, default=0.5)
    p.add_argument("--right-mass2", type=float, default=0.5)
    p.add_argument("--corr", type=float, default=0.0, help="mix coordinates to this correlation")
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--bins", type=int, nargs=2, default=[8, 8], metavar=("RADIAL", "ANGULAR"))
    common(p, seed=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("degree", help="estimate the density degree at a point")
    p.add_argument("--data", required=True)
    p.add_argument("--column")
    p.add_argument("--center", type=float, default=0.0)
    p.add_argument("--window", type=float)
    p.add_argument("--bandwidth", type=float)
    common(p)
    p.set_defaults(func=cmd_degree)
    return parser


def _fail(code, exc):
    msg = str(exc).replace("\n", " ")
    print(json.dumps({"error": type(exc).__name__, "message": msg}), file=sys.stderr)
    return code


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except (mixture.DegenerateFitError, ArithmeticError) as exc:
        return _fail(2, exc)
    except (ValueError, KeyError, TypeError, OSError) as exc:
        return _fail(1, exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
