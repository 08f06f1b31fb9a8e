"""
Independent radius and angle
============================

For two independent coordinates with a common quasi-standard and one
exponent per coordinate, radius and angle come out independent. Unequal
scales, correlation, or an exponent that changes across the center make
them dependent, and the chi-square harness picks that up.
"""

import math

import quasigauss as qg
from quasigauss import ProductQuasiGaussian

n, trials = 5000, 200


def rate(model, mix=None, seed=0):
    return qg.verify_characterization(model, n, trials, seed=seed, mix=mix).rejection_rate


sym = ProductQuasiGaussian((qg.make_params(0, 2, 2, 1, 0.3), qg.make_params(0, 0, 0, 1, 0.5)))
print("common sigma, exponents 2 and 0:        ", rate(sym))

gauss = ProductQuasiGaussian.iid(qg.make_params(0, 0, 0, 1, 0.5), 2)
print("independent Gaussians:                  ", rate(gauss))

scales = ProductQuasiGaussian((qg.make_params(0, 0, 0, 1, 0.5), qg.make_params(0, 0, 0, 2, 0.5)))
print("sigma 1 and 2:                          ", rate(scales))

print("correlation 0.5:                        ", rate(gauss, mix=[[1, 0], [0.5, math.sqrt(0.75)]]))

# exponent 2 left of the center, 0 to the right: the radial law differs
# between the half-planes
split = ProductQuasiGaussian((qg.make_params(0, 2, 0, 1, 0.5), qg.make_params(0, 0, 0, 1, 0.5)))
print("exponents (2, 0) on the first coordinate:", rate(split))
