"""
Evaluating a quasi-Gaussian law
===============================

Density, distribution function, quantiles, moments and tails of one
lopsided member of the family.
"""

import numpy as np

import quasigauss as qg

# a density vanishing like x**2 to the left of the center, flat to the right,
# with 30% of the mass on the right
p = qg.make_params(a=1.0, alpha_neg=2.0, alpha_pos=0.0, sigma=0.8, right_mass=0.3)
print(p)
print("left/right mass:", p.left_mass, p.right_mass)

x = np.linspace(-2, 4, 7)
for xi, f, F in zip(x, qg.pdf(p, x), qg.cdf(p, x)):
    print(f"x={xi:5.2f}  pdf={f:.6f}  cdf={F:.6f}")

# quantiles invert the cdf
u = np.array([0.01, 0.5, 0.7, 0.99])
print("quantiles:", qg.quantile(p, u))
print("round trip:", qg.cdf(p, qg.quantile(p, u)))

# moments are taken about the quasi-center a
for order in (1, 2, 3):
    print(f"order {order}: right {qg.moment(p, order, 'positive'):.6f}  left {qg.moment(p, order, 'negative'):.6f}")

# the leading-order tail term against the exact upper tail
for y in (2.0, 4.0, 6.0):
    y = y * p.sigma
    print(f"y={y:.1f}  exact={qg.sf(p, p.a + y):.3e}  asymptote={qg.tail_asymptote(p, y):.3e}")
