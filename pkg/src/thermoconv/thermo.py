"""Thermodynamic consequences of finite-size interconversion.

Work distillation and formation at finite copy number split symmetrically
around the asymptotic free-energy value, with a gap set by the
relative-entropy variance and the inverse normal CDF.  Heat engines with a
finite working body inherit the same structure: the optimal per-copy work
carries an inverse Rayleigh-normal correction, and whenever the demanded
error lies below the threshold infidelity of the underlying conversion the
achievable efficiency sits strictly below the integrated Carnot value.

Everything here is a second-order estimate, evaluated exactly as the
expansion formulas are written; exact finite-n answers live in the
iid module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar
from scipy.special import ndtri

from .asymptotics import irreversibility_nu
from .distributions import (
    FLOAT,
    Distribution,
    ThermalSystem,
    gibbs_state,
    heat_capacity,
    rel_entropy,
    rel_entropy_variance,
)
from .rayleigh import rayleigh_normal_inverse

__all__ = [
    "ALPHA_CURVATURE",
    "SECOND_ORDER_ESTIMATE",
    "EngineSetup",
    "WorkReport",
    "EnginePerformance",
    "reversibility_rate",
    "combined_error_bound",
    "work_report",
    "distillable_work",
    "work_of_formation",
    "work_gap",
    "thermal_work_gap",
    "carnot_work",
    "engine_nu",
    "engine_performance",
    "engine_error_rate",
    "matched_variance_temperature",
]

# Curvature of nu -> Z_nu(0) at nu = 1, so that Z_nu(0) <= ALPHA * ln(nu)^2.
# The rayleigh test suite audits this constant against the family itself.
ALPHA_CURVATURE = 0.0545

# Tag attached to every report produced here; these are expansion values,
# not exact optima.
SECOND_ORDER_ESTIMATE = "second-order estimate"


@dataclass(frozen=True)
class EngineSetup:
    """Hot bath at ``th``, working body of ``n`` copies driven from ``tc``
    to ``tc_prime``; the body's Hamiltonian and k_B sit in ``system``."""

    system: ThermalSystem
    th: float
    tc: float
    tc_prime: float
    n: int = 1

    def __post_init__(self):
        if not (self.th > 0 and self.tc > 0 and self.tc_prime > 0):
            raise ValueError("temperatures must be positive")
        if not self.th > self.tc:
            raise ValueError("hot bath must be hotter than the initial body")
        if not self.th > self.tc_prime:
            raise ValueError("final body temperature must stay below the hot bath")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")


@dataclass(frozen=True)
class WorkReport:
    """Distillable work and work of formation around the asymptotic value.

    ``wd`` and ``wf`` sit at ``w -+ delta_w`` with the smaller of the pair
    completed from ``2*w`` so their average is the asymptotic value ulp for
    ulp; the gap ``delta_w`` is nonnegative for epsilon < 1/2.
    """

    w: float
    delta_w: float
    wd: float
    wf: float

    @property
    def kind(self) -> str:
        return SECOND_ORDER_ESTIMATE


class EnginePerformance(NamedTuple):
    w: float
    q_out: float
    eta: float
    eta_carnot_integrated: float
    eta_second_order: float


def reversibility_rate(
    n: int,
    eps1: float,
    eps2: float,
    p: Distribution,
    q: Distribution,
    gamma: Distribution,
) -> float:
    """Round-trip rate for p -> q -> p with infidelities eps1, eps2.

    Equals 1 + sqrt(V(p)/(n D(p)^2)) (Z^-1_{1/nu}(eps1) + Z^-1_{1/nu}(eps2));
    below 1 for small errors whenever nu differs from 1.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    for eps in (eps1, eps2):
        if not 0.0 < float(eps) < 1.0:
            raise ValueError("error budgets must lie strictly between 0 and 1")
    nu = irreversibility_nu(p, q, gamma)
    if nu == 0.0:
        # V(p) = 0: the correction vanishes identically.
        return 1.0
    dp = rel_entropy(p, gamma)
    vp = rel_entropy_variance(p, gamma)
    z = rayleigh_normal_inverse(float(eps1), 1.0 / nu) + rayleigh_normal_inverse(
        float(eps2), 1.0 / nu
    )
    return 1.0 + math.sqrt(vp / (n * dp * dp)) * z


def combined_error_bound(eps1: float, eps2: float) -> float:
    """Tight infidelity bound for two conversions in sequence:
    (sqrt(eps1 (1 - eps2)) + sqrt(eps2 (1 - eps1)))^2."""
    e1 = float(eps1)
    e2 = float(eps2)
    if not (0.0 <= e1 and 0.0 <= e2 and e1 + e2 < 1.0):
        raise ValueError("error budgets must be nonnegative with sum below 1")
    root = math.sqrt(e1 * (1.0 - e2)) + math.sqrt(e2 * (1.0 - e1))
    return root * root


def _work_unit(system: ThermalSystem) -> float:
    # k_B T = 1/beta; a heat-bath at infinite temperature has no finite
    # work unit (use degenerate energies at finite temperature instead).
    if system.beta == 0:
        raise ValueError("work is measured in units of k_B T; beta must be positive")
    return 1.0 / float(system.beta)


def work_report(n: int, epsilon: float, p: Distribution, system: ThermalSystem) -> WorkReport:
    """Second-order distillable work and work of formation for n copies."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    kbt = _work_unit(system)
    # Estimates are float-valued; measure against the true float Gibbs
    # state rather than a rationalized embedding stand-in.
    gamma = gibbs_state(system, mode=FLOAT)
    d = rel_entropy(p.to_float(), gamma)
    if d == 0:
        raise ValueError("state equals the thermal state; it carries no work")
    if not math.isfinite(d):
        raise ValueError("state lies outside the thermal support")
    v = rel_entropy_variance(p.to_float(), gamma)
    w = kbt * d
    delta = -kbt * math.sqrt(v / n) * float(ndtri(epsilon))
    # Anchor the larger of the pair and complete the other from 2w; the
    # subtraction is then exact (Sterbenz) whenever |delta| <= 3w, making
    # the pair average to w ulp for ulp.
    wd = w - delta
    wf = w + delta
    if abs(wf) >= abs(wd):
        wd = 2.0 * w - wf
    else:
        wf = 2.0 * w - wd
    return WorkReport(w=w, delta_w=delta, wd=wd, wf=wf)


def distillable_work(n: int, epsilon: float, p: Distribution, system: ThermalSystem) -> float:
    return work_report(n, epsilon, p, system).wd


def work_of_formation(n: int, epsilon: float, p: Distribution, system: ThermalSystem) -> float:
    return work_report(n, epsilon, p, system).wf


def work_gap(n: int, epsilon: float, p: Distribution, system: ThermalSystem) -> float:
    return 2.0 * work_report(n, epsilon, p, system).delta_w


def _thermal_moments(system: ThermalSystem, temperature: float):
    """Mean, variance and third central moment of energy at ``temperature``."""
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    energies = np.array([float(e) for e in system.energies])
    beta = 1.0 / (system.kB * temperature)
    x = -beta * energies
    x -= x.max()
    w = np.exp(x)
    probs = w / w.sum()
    mean = float(probs @ energies)
    centred = energies - mean
    var = float(probs @ centred**2)
    third = float(probs @ centred**3)
    return mean, var, third


def _thermal_rel_entropy_variance(system: ThermalSystem, t_from: float, t_to: float) -> float:
    # V(gamma_from || gamma_to) = (beta_to - beta_from)^2 Var_from(E).
    beta_from = 1.0 / (system.kB * t_from)
    beta_to = 1.0 / (system.kB * t_to)
    _, var, _ = _thermal_moments(system, t_from)
    return (beta_to - beta_from) ** 2 * var


def thermal_work_gap(
    system: ThermalSystem, t: float, t_prime: float, n: int, epsilon: float
):
    """Work gap for interconverting thermal states at t and t_prime.

    Returns (delta_w, f, w) with delta_w = -f * w * inverse_normal(epsilon):
    f is the relative energy fluctuation of the n-copy body at t_prime and
    w the per-copy energy scale |1 - t/t_prime| <E>.
    """
    if not (t > 0 and t_prime > 0):
        raise ValueError("temperatures must be positive")
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    c = heat_capacity(system, t_prime)
    mean, _, _ = _thermal_moments(system, t_prime)
    if mean == 0.0:
        raise ValueError("mean energy vanishes at t_prime; shift the energy zero")
    f = math.sqrt(system.kB * c / n) * t_prime / mean
    if t == t_prime:
        return 0.0, f, 0.0
    w = abs(mean) * abs(1.0 - t / t_prime)
    delta = -f * w * float(ndtri(epsilon))
    return delta, f, w


def _thermal_state(system: ThermalSystem, temperature: float) -> Distribution:
    return gibbs_state(system.at_temperature(temperature), mode=FLOAT)


def carnot_work(setup: EngineSetup) -> float:
    """Asymptotic per-copy work of driving the body from tc to tc_prime:
    k_B Th (D(gamma_c || gamma_h) - D(gamma_c' || gamma_h))."""
    gamma_h = _thermal_state(setup.system, setup.th)
    d_c = rel_entropy(_thermal_state(setup.system, setup.tc), gamma_h)
    d_cp = rel_entropy(_thermal_state(setup.system, setup.tc_prime), gamma_h)
    return setup.system.kB * setup.th * (d_c - d_cp)


def engine_nu(setup: EngineSetup) -> float:
    """Variance ratio V(gamma_c || gamma_h) / V(gamma_c' || gamma_h)
    governing the engine's Rayleigh-normal correction."""
    v_c = _thermal_rel_entropy_variance(setup.system, setup.tc, setup.th)
    v_cp = _thermal_rel_entropy_variance(setup.system, setup.tc_prime, setup.th)
    if v_cp == 0.0:
        raise ValueError(
            "final body state has zero relative-entropy variance; the "
            "variance ratio is undefined (matched variances give nu = 1 "
            "and near-perfect work)"
        )
    return v_c / v_cp


def engine_performance(
    setup: EngineSetup, n: Optional[int] = None, epsilon: float = 0.05
) -> EnginePerformance:
    """Per-copy work, emitted heat, and efficiencies at error ``epsilon``.

    w = k_B Th (dD + sqrt(V_c / n) Z^-1_{1/nu}(epsilon)); q_out = n dE with
    dE the per-copy energy absorbed by the body; eta = (1 + q_out/W)^-1.
    The integrated Carnot efficiency replaces w by its asymptotic value,
    and the second-order efficiency expands eta around it using the heat
    capacity at tc.
    """
    if n is None:
        n = setup.n
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    system = setup.system
    kb = system.kB
    nu = engine_nu(setup)

    gamma_h = _thermal_state(system, setup.th)
    d_c = rel_entropy(_thermal_state(system, setup.tc), gamma_h)
    d_cp = rel_entropy(_thermal_state(system, setup.tc_prime), gamma_h)
    delta_d = d_c - d_cp
    v_c = _thermal_rel_entropy_variance(system, setup.tc, setup.th)

    z = rayleigh_normal_inverse(epsilon, 1.0 / nu)
    w = kb * setup.th * (delta_d + math.sqrt(v_c / n) * z)

    mean_c, _, _ = _thermal_moments(system, setup.tc)
    mean_cp, _, _ = _thermal_moments(system, setup.tc_prime)
    delta_e = mean_cp - mean_c
    q_out = n * delta_e

    total_work = n * w
    eta = 1.0 / (1.0 + q_out / total_work)

    asymptotic = kb * setup.th * delta_d
    eta_carnot = 1.0 / (1.0 + delta_e / asymptotic)

    c_tc = heat_capacity(system, setup.tc)
    correction = (
        kb
        * (setup.th - setup.tc)
        * delta_e
        / (asymptotic + delta_e) ** 2
        * math.sqrt(c_tc / (n * kb))
        * z
    )
    eta_second = eta_carnot + correction
    return EnginePerformance(w, q_out, eta, eta_carnot, eta_second)


def _log_variance_derivative(system: ThermalSystem, th: float, t: float) -> float:
    """d/dT of ln V(gamma_T || gamma_h), in closed form."""
    kb = system.kB
    beta_h = 1.0 / (kb * th)
    beta_t = 1.0 / (kb * t)
    _, var, third = _thermal_moments(system, t)
    if var == 0.0:
        raise ValueError("energy variance vanishes; log-derivative singular")
    return (2.0 / (beta_h - beta_t) + third / var) / (kb * t * t)


def engine_error_rate(
    system: ThermalSystem,
    th: float,
    tc: float,
    tc_prime: float,
    analytic: bool = False,
):
    """Log-variance slope g(tc) and the accumulated-error bound
    ALPHA_CURVATURE * (integral of |g| from tc to tc_prime)^2.

    The bound dominates ALPHA_CURVATURE * ln(nu)^2, which in turn dominates
    the threshold infidelity of the one-step conversion.  By default g is
    taken by central differences with step 1e-6 * T; ``analytic`` switches
    to the closed-form cumulant expression.
    """
    if not (th > 0 and tc > 0 and tc_prime > 0):
        raise ValueError("temperatures must be positive")
    lo, hi = min(tc, tc_prime), max(tc, tc_prime)
    if lo <= th <= hi or tc == th or tc_prime == th:
        raise ValueError(
            "hot-bath temperature lies in the integration range; the "
            "log-variance derivative is singular there"
        )
    energies = [float(e) for e in system.energies]
    if max(energies) == min(energies):
        raise ValueError("degenerate spectrum has zero energy variance")

    if analytic:
        g = lambda t: _log_variance_derivative(system, th, t)
    else:

        def g(t: float) -> float:
            h = 1e-6 * t
            up = math.log(_thermal_rel_entropy_variance(system, t + h, th))
            down = math.log(_thermal_rel_entropy_variance(system, t - h, th))
            return (up - down) / (2.0 * h)

    if tc == tc_prime:
        return g(tc), 0.0
    total, _ = quad(lambda t: abs(g(t)), lo, hi, limit=200)
    return g(tc), ALPHA_CURVATURE * total * total


def matched_variance_temperature(system: ThermalSystem, th: float, tx: float) -> float:
    """The temperature on the other side of the variance peak with
    V(gamma_T || gamma_h) equal to V(gamma_tx || gamma_h).

    Such a partner exists for any 0 < tx < th away from the peak because V
    vanishes at both ends of (0, th); a matched pair makes the conversion's
    variance ratio 1 and its threshold infidelity 0.
    """
    if not 0.0 < tx < th:
        raise ValueError("tx must lie strictly between 0 and th")
    vfun = lambda t: _thermal_rel_entropy_variance(system, t, th)
    target = vfun(tx)
    if target == 0.0:
        raise ValueError("variance already vanishes at tx")
    lo = 1e-9 * th
    hi = th * (1.0 - 1e-12)
    res = minimize_scalar(
        lambda t: -vfun(t), bounds=(lo, th * (1.0 - 1e-9)), method="bounded"
    )
    t_peak = float(res.x)
    if abs(tx - t_peak) <= 1e-9 * th:
        raise ValueError("tx sits at the variance peak; no distinct partner")
    if tx < t_peak:
        bracket = (t_peak, hi)
    else:
        bracket = (lo, t_peak)
    h = lambda t: vfun(t) - target
    a, b = bracket
    if h(a) == 0.0:
        return a
    if h(b) == 0.0:
        return b
    if h(a) * h(b) > 0:
        raise RuntimeError("variance-matching bracket failed")
    return float(brentq(h, a, b, xtol=1e-14, rtol=8.9e-16))
