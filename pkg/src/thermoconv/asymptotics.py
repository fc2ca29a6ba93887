"""Second-order expansions of the optimal conversion rate.

The rate at which n copies of p convert into copies of q within infidelity
epsilon expands as

    R(n, eps) = D(p) / D(q) + (coefficient) / sqrt(n) + o(1 / sqrt(n)),

with D the relative entropy to the thermal state.  The 1/sqrt(n)
coefficient is governed by the inverse Rayleigh-normal CDF evaluated at the
irreversibility ratio nu = (V(p)/D(p)) / (V(q)/D(q)); it degenerates to the
inverse normal CDF when either relative-entropy variance vanishes
(distillation-like and formation-like regimes) and the expansion collapses
to an exact floor formula when both vanish.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from scipy.special import ndtri

from .distributions import (
    RATIONAL,
    Distribution,
    rel_entropy,
    rel_entropy_variance,
)
from .rayleigh import RayleighNormalParams, rayleigh_normal_cdf, rayleigh_normal_inverse

__all__ = [
    "Regime",
    "RateExpansion",
    "irreversibility_nu",
    "rate_expansion",
    "second_order_rate",
    "flat_to_flat_exact_rate",
]

# Below this, a float-mode relative-entropy variance counts as zero; within
# the decade above it the regime is ambiguous and we warn.
_V_ZERO_TOL = 1e-12
_V_BORDERLINE = 1e-10


class Regime(enum.Enum):
    GENERAL = "general"
    DISTILLATION = "distillation"
    FORMATION = "formation"
    FLAT_TO_FLAT = "flatToFlat"


@dataclass(frozen=True)
class RateExpansion:
    """First-order rate, 1/sqrt(n) coefficient, and regime diagnostics."""

    first_order: float
    second_order_coefficient: float
    nu: float
    regime: Regime

    def evaluate(self, n: int) -> float:
        return self.first_order + self.second_order_coefficient / math.sqrt(n)


def _is_scaled_copy(p: Distribution, q: Distribution) -> bool:
    """Exact test that log(p_i/q_i) is constant on the support of p."""
    ratio = None
    for pi, qi in zip(p.entries, q.entries):
        if pi == 0:
            continue
        r = Fraction(pi) / Fraction(qi)
        if ratio is None:
            ratio = r
        elif r != ratio:
            return False
    return True


def _variance_with_zero_test(p: Distribution, gamma: Distribution):
    """(V, is_zero, is_borderline) with an exact zero test in rational mode."""
    if p.mode == RATIONAL and gamma.mode == RATIONAL:
        if _is_scaled_copy(p, gamma):
            return 0.0, True, False
        return rel_entropy_variance(p, gamma), False, False
    v = rel_entropy_variance(p, gamma)
    if v <= _V_ZERO_TOL:
        return 0.0, True, False
    if v < _V_BORDERLINE:
        warnings.warn(
            "relative-entropy variance is borderline zero; regime "
            "classification may be unstable",
            RuntimeWarning,
            stacklevel=3,
        )
        return v, False, True
    return v, False, False


def irreversibility_nu(p: Distribution, q: Distribution, gamma: Distribution) -> float:
    """Ratio (V(p)/D(p)) / (V(q)/D(q)) of variance-to-entropy slopes.

    Returns 0 when p is an exact thermal rescaling (V(p) = 0); requires
    V(q) > 0 and both relative entropies positive.
    """
    dp = rel_entropy(p, gamma)
    dq = rel_entropy(q, gamma)
    if not dp > 0 or not dq > 0:
        raise ValueError("both states must differ from the thermal state")
    vp, vp_zero, _ = _variance_with_zero_test(p, gamma)
    vq, vq_zero, _ = _variance_with_zero_test(q, gamma)
    if vq_zero:
        raise ValueError("irreversibility ratio undefined: V(q) = 0")
    if vp_zero:
        return 0.0
    return (vp / dp) / (vq / dq)


def rate_expansion(
    p: Distribution, q: Distribution, gamma: Distribution, epsilon: float
) -> RateExpansion:
    """Regime-classified expansion of the conversion rate at infidelity
    ``epsilon``; see the module docstring for the four regimes."""
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    dp = rel_entropy(p, gamma)
    dq = rel_entropy(q, gamma)
    if not dp > 0 or not dq > 0:
        raise ValueError("both states must differ from the thermal state")
    vp, vp_zero, vp_edge = _variance_with_zero_test(p, gamma)
    vq, vq_zero, vq_edge = _variance_with_zero_test(q, gamma)
    first = dp / dq

    if vp_zero and vq_zero:
        return RateExpansion(first, 0.0, math.nan, Regime.FLAT_TO_FLAT)
    if vq_zero:
        coeff = math.sqrt(vp) / dq * float(ndtri(epsilon))
        return RateExpansion(first, coeff, math.inf, Regime.DISTILLATION)
    if vp_zero:
        coeff = math.sqrt(first * vq) / dq * float(ndtri(epsilon))
        return RateExpansion(first, coeff, 0.0, Regime.FORMATION)
    nu = (vp / dp) / (vq / dq)
    if vp_edge or vq_edge:
        # A near-vanishing variance makes its own square-root scaling noisy;
        # the target-scaled form is the stabler of the two equivalent ones.
        coeff = first * math.sqrt(vq / (dp * dq)) * rayleigh_normal_inverse(epsilon, nu)
    else:
        coeff = math.sqrt(vp) / dq * rayleigh_normal_inverse(epsilon, 1.0 / nu)
    return RateExpansion(first, coeff, nu, Regime.GENERAL)


def second_order_rate(
    n: int,
    epsilon: float,
    p: Distribution,
    q: Distribution,
    gamma: Distribution,
    form: str = "auto",
) -> float:
    """Rate approximation at finite n.

    ``form`` selects between the two equivalent general-regime expressions:
    "initial" scales the inverse law at 1/nu by sqrt(V(p)/(n*D(p)^2));
    "target" scales the inverse law at nu by sqrt(V(q)/(n*D(p)*D(q))).
    They agree through the duality of the family; "auto" uses the initial
    form.  The flat-to-flat regime returns the exact floor formula instead
    of an expansion.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    expansion = rate_expansion(p, q, gamma, epsilon)
    if expansion.regime is Regime.FLAT_TO_FLAT:
        dp = rel_entropy(p, gamma)
        dq = rel_entropy(q, gamma)
        return float(flat_to_flat_exact_rate(n, epsilon, dp, dq))
    if expansion.regime is Regime.GENERAL and form != "auto":
        dp = rel_entropy(p, gamma)
        dq = rel_entropy(q, gamma)
        vp = rel_entropy_variance(p, gamma)
        vq = rel_entropy_variance(q, gamma)
        nu = expansion.nu
        if form == "initial":
            coeff = math.sqrt(vp) / dq * rayleigh_normal_inverse(epsilon, 1.0 / nu)
        elif form == "target":
            coeff = (dp / dq) * math.sqrt(vq / (dp * dq)) * rayleigh_normal_inverse(
                epsilon, nu
            )
        else:
            raise ValueError("form must be one of 'auto', 'initial', 'target'")
        return dp / dq + coeff / math.sqrt(n)
    return expansion.evaluate(n)


def flat_to_flat_exact_rate(n: int, epsilon: float, d_initial, d_target) -> Fraction:
    """Exact optimal rate when both variances vanish.

    The achievable copy count is the floor of
    (n * D(p) - log(1 - epsilon)) / D(q); the rate is that integer over n.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    epsilon = float(epsilon)
    if not 0.0 <= epsilon < 1.0:
        raise ValueError("epsilon must lie in [0, 1)")
    d_initial = float(d_initial)
    d_target = float(d_target)
    if not d_target > 0:
        raise ValueError("target relative entropy must be positive")
    if d_initial < 0:
        raise ValueError("initial relative entropy must be nonnegative")
    m = math.floor((n * d_initial - math.log1p(-epsilon)) / d_target)
    return Fraction(m, n)
