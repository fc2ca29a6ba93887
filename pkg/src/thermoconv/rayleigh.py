"""The Rayleigh-normal family: the limit law of second-order conversion.

Z_nu(mu) is one minus the best fidelity between the standard normal and any
distribution whose CDF dominates the normal with mean mu and variance nu.
The family interpolates between the normal CDF (nu = 0, and again as
nu -> infinity after rescaling) and a Rayleigh-type law at nu = 1, and obeys
the duality Z_{1/nu}(mu) = Z_nu(sqrt(nu) * mu).

Evaluation for nu > 1 reduces to a single crossing point alpha where the
density ratio of the two normals equals the ratio of their CDFs.  Below
alpha the optimiser follows a rescaled copy of the shifted normal, and that
branch of the fidelity integral collapses to sqrt(Phi(alpha) *
Phi_{mu,nu}(alpha)); only the branch above alpha needs quadrature of the
geometric mean of the two densities.  Values for nu < 1 use the duality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import log_ndtr, ndtri

__all__ = [
    "RayleighNormalParams",
    "std_normal_cdf",
    "normal_cdf",
    "alpha_root",
    "rayleigh_normal_cdf",
    "rayleigh_normal_inverse",
    "threshold_infidelity",
]

_SQRT2 = math.sqrt(2.0)
_LOG_2PI = math.log(2.0 * math.pi)
_SCAN_LIMIT = 1e8
_ROOT_RESIDUAL = 1e-12
_INVERSE_TOL = 1e-9
# Within this distance of nu = 1 the crossing point runs off to infinity and
# the closed nu = 1 form is used instead; the family is Lipschitz in nu near 1
# (slope about 0.2), so the substitution costs at most ~2e-7.
_NU_ONE_TOL = 1e-6
_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class RayleighNormalParams:
    """Mean shift ``mu`` and variance ratio ``nu`` (nonnegative)."""

    mu: float
    nu: float

    def __post_init__(self):
        mu = float(self.mu)
        nu = float(self.nu)
        if not math.isfinite(mu):
            raise ValueError("mu must be finite")
        if not (math.isfinite(nu) and nu >= 0):
            raise ValueError("nu must be finite and nonnegative")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error integral."""
    return 0.5 * math.erfc(-float(x) / _SQRT2)


def normal_cdf(x: float, mu: float, nu: float) -> float:
    """Normal CDF with mean ``mu`` and variance ``nu`` (nu > 0)."""
    nu = float(nu)
    if not nu > 0:
        raise ValueError("variance must be positive")
    return std_normal_cdf((float(x) - float(mu)) / math.sqrt(nu))


def _log_density_gap(x: float, mu: float, nu: float) -> float:
    """log phi(x) - log phi_{mu,nu}(x); the 2*pi terms cancel except ln nu.

    The quadratic part is the factored ((x - mu)^2 - nu x^2) / (2 nu); the
    grouping x*(1 -+ sqrt(nu)) - mu keeps it stable when nu is near 1 and
    |x| is large, where the expanded form loses every significant digit.
    """
    root_nu = math.sqrt(nu)
    lo = x * (1.0 - root_nu) - mu
    hi = x * (1.0 + root_nu) - mu
    return lo * hi / (2.0 * nu) + 0.5 * math.log(nu)


def _crossing_gap(x: float, mu: float, nu: float) -> float:
    """Zero exactly where the density ratio equals the CDF ratio."""
    return (
        _log_density_gap(x, mu, nu)
        - log_ndtr(x)
        + log_ndtr((x - mu) / math.sqrt(nu))
    )


def alpha_root(mu: float, nu: float) -> float:
    """Unique crossing point for nu > 1.

    The scan starts where the two log-densities have equal slope scaled by
    nu (mu*nu/(nu-1)) and expands geometrically in the needed direction;
    failure to bracket within the scan range is reported, never clamped.
    The residual is held to 1e-12 plus the rounding floor of the gap
    evaluation, which grows with the cancelling magnitudes at large |x|.
    """
    mu = float(mu)
    nu = float(nu)
    if not nu > 1:
        raise ValueError("alpha_root requires nu > 1")

    def g(x):
        return _crossing_gap(x, mu, nu)

    x0 = mu * nu / (nu - 1.0)
    if abs(x0) > _SCAN_LIMIT:
        x0 = math.copysign(_SCAN_LIMIT, x0)
    g0 = g(x0)
    if g0 == 0.0:
        return x0
    step = max(1.0, abs(x0))
    if g0 > 0:
        # g falls to -infinity on the right; march right for a sign change.
        a, b = x0, x0 + step
        while g(b) > 0:
            a = b
            step *= 2.0
            b = x0 + step
            if b > _SCAN_LIMIT:
                raise RuntimeError("crossing-point bracket not found in scan range")
    else:
        # g tends to log(nu) > 0 on the left; march left.
        b, a = x0, x0 - step
        while g(a) < 0:
            b = a
            step *= 2.0
            a = x0 - step
            if a < -_SCAN_LIMIT:
                raise RuntimeError("crossing-point bracket not found in scan range")
    root = brentq(g, a, b, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    root_nu = math.sqrt(nu)
    cond = (
        (abs(root) * abs(1.0 - root_nu) + abs(mu))
        * (abs(root) * (1.0 + root_nu) + abs(mu)) / nu
        + abs(log_ndtr(root)) + abs(log_ndtr((root - mu) / root_nu)) + 1.0
    )
    if abs(g(root)) > _ROOT_RESIDUAL + 32.0 * _EPS * cond:
        raise RuntimeError("crossing-point residual above tolerance")
    return float(root)


def _z_above_one(mu: float, nu: float) -> float:
    alpha = alpha_root(mu, nu)
    root_nu = math.sqrt(nu)
    head = math.exp(0.5 * (log_ndtr(alpha) + log_ndtr((alpha - mu) / root_nu)))
    norm = math.exp(-0.25 * math.log(nu) - 0.5 * _LOG_2PI)

    def integrand(x):
        return norm * math.exp(-0.25 * x * x - (x - mu) ** 2 / (4.0 * nu))

    center = mu / (nu + 1.0)
    upper = max(alpha, center) + 10.0 * root_nu
    tail, _ = quad(integrand, alpha, upper, epsabs=1e-12, epsrel=1e-12, limit=200)
    overlap = head + tail
    return min(max(1.0 - overlap * overlap, 0.0), 1.0)


def rayleigh_normal_cdf(params: RayleighNormalParams) -> float:
    """Z_nu(mu); exact branches at nu = 0 and near nu = 1, duality below 1."""
    mu, nu = params.mu, params.nu
    if nu == 0.0:
        return std_normal_cdf(mu)
    if abs(nu - 1.0) <= _NU_ONE_TOL:
        if mu <= 0.0:
            return 0.0
        return -math.expm1(-0.25 * mu * mu)
    if nu < 1.0:
        return _z_above_one(mu / math.sqrt(nu), 1.0 / nu)
    return _z_above_one(mu, nu)


def rayleigh_normal_inverse(epsilon: float, nu: float) -> float:
    """mu with Z_nu(mu) = epsilon, to within 1e-9 in the value."""
    epsilon = float(epsilon)
    nu = float(nu)
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    if not (math.isfinite(nu) and nu >= 0.0):
        raise ValueError("nu must be finite and nonnegative")
    if nu == 0.0:
        return float(ndtri(epsilon))
    if abs(nu - 1.0) <= _NU_ONE_TOL:
        return 2.0 * math.sqrt(-math.log1p(-epsilon))

    def f(mu):
        return rayleigh_normal_cdf(RayleighNormalParams(mu, nu)) - epsilon

    lo, hi = -1.0, 1.0
    for _ in range(80):
        if f(lo) < 0:
            break
        lo *= 2.0
    else:
        raise RuntimeError("no lower bracket for the inverse")
    for _ in range(80):
        if f(hi) > 0:
            break
        hi *= 2.0
    else:
        raise RuntimeError("no upper bracket for the inverse")
    root = brentq(f, lo, hi, xtol=1e-13, rtol=8.9e-16, maxiter=200)
    if abs(f(root)) > _INVERSE_TOL:
        raise RuntimeError("inverse residual above tolerance")
    return float(root)


def threshold_infidelity(nu: float) -> float:
    """Smallest infidelity with a meaningful rate: Z_nu(0).

    Defined for finite positive nu; equals 0 exactly at nu = 1 and is
    symmetric under nu -> 1/nu.  Always at most 1/2.
    """
    nu = float(nu)
    if not (math.isfinite(nu) and nu > 0):
        raise ValueError("nu must be finite and positive")
    return rayleigh_normal_cdf(RayleighNormalParams(0.0, nu))
