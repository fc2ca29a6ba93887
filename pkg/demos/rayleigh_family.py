"""The one-parameter CDF family behind second-order conversion errors.

At nu = 0 the family is the standard normal law, at nu = 1 a Rayleigh
law, and the two halves nu < 1 and nu > 1 mirror each other through the
duality Z_nu(mu) = Z_{1/nu}(mu / sqrt(nu)).  The value at mu = 0 is the
threshold error budget separating lossy from lossless round trips.
"""

import math

from thermoconv import (
    RayleighNormalParams,
    rayleigh_normal_cdf,
    rayleigh_normal_inverse,
    threshold_infidelity,
)


def z(mu, nu):
    return rayleigh_normal_cdf(RayleighNormalParams(mu=mu, nu=nu))


print("family members across shapes, evaluated on a grid of mu:")
header = " ".join(f"{mu:>8.1f}" for mu in (-1.0, 0.0, 1.0, 2.0, 3.0))
print(f"{'nu':>6} {header}")
for nu in (0.0, 0.2, 1.0, 2.0, 5.0):
    row = " ".join(f"{z(mu, nu):>8.5f}" for mu in (-1.0, 0.0, 1.0, 2.0, 3.0))
    print(f"{nu:>6.1f} {row}")

print()
print("closed form at nu = 1:  Z(2) =", z(2.0, 1.0), "= 1 - exp(-1) =", 1 - math.exp(-1))

print()
print("duality check: Z_4(1.2) =", z(1.2, 4.0),
      " Z_{1/4}(0.6) =", z(0.6, 0.25))

print()
print("threshold budgets (value at mu = 0, zero exactly at nu = 1):")
for nu in (1.0, 1.2, 2.0, 5.0, 20.0):
    print(f"  nu = {nu:>5.1f}: {threshold_infidelity(nu):.9f}")

print()
eps = 0.05
for nu in (0.3, 1.0, 2.5):
    mu = rayleigh_normal_inverse(eps, nu)
    print(f"inverse at eps = {eps}, nu = {nu}: mu = {mu:.9f}"
          f"  (round trip {z(mu, nu):.9f})")
