"""
Fitting a mixture by EM
=======================

Two quasi-Gaussian components, one flat and one vanishing at its center,
plus a run with a point mass that the fit detects from exact duplicates.
"""

import numpy as np

import quasigauss as qg
from quasigauss import EmConfig, MixtureModel, ProductQuasiGaussian
from quasigauss.mixture import Atom

truth = MixtureModel(
    (0.5, 0.5),
    (
        ProductQuasiGaussian((qg.make_params(-3, 0, 0, 1, 0.5),)),
        ProductQuasiGaussian((qg.make_params(3, 2, 2, 1, 0.5),)),
    ),
)
x = qg.sample_mixture(truth, seed=7, n=20_000)
res = qg.fit_em(x, 2, config=EmConfig(seed=7))
print(f"converged={res.converged} after {res.n_iter} iterations")
for w, comp in zip(res.model.weights, res.model.components):
    p = comp.coords[0]
    print(f"weight {w:.3f}  a={p.a:+.3f}  alpha=({p.alpha_neg:.2f}, {p.alpha_pos:.2f})  sigma={p.sigma:.3f}")
print("log-likelihood: fitted", round(res.log_likelihood, 2), " generating", round(qg.log_likelihood(truth, x), 2))
print("trace never decreases:", bool(np.all(np.diff(res.trace) >= -1e-9)))

# 20% of the rows sit exactly on one value
with_atom = MixtureModel((0.8,), (ProductQuasiGaussian((qg.make_params(0, 1, 1, 1, 0.5),)),), Atom(0.2, (0.5,)))
y = qg.sample_mixture(with_atom, seed=2, n=10_000)
fit = qg.fit_em(y, 1, atom_policy="detect-duplicates", config=EmConfig(restarts=1))
print("atom:", fit.model.atom)
