"""
Degree of a density at the origin
=================================

A density behaving like |x|**mu near zero has degree mu. The estimator fits
the slope of a log-scale kernel density estimate.
"""

import quasigauss as qg

for alpha in (-0.5, 0.0, 1.0, 2.0, 3.0):
    x = qg.sample(qg.make_params(0, alpha, alpha, 1, 0.5), seed=3, n=100_000)
    est = qg.estimate_regularity_degree(x)
    print(f"alpha={alpha:4.1f}  mu_hat={est.mu_hat:6.3f} +- {est.stderr:.3f}  ({est.n_local} points within {est.window:.2f})")
