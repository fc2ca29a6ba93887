"""Probability distributions over energy levels, in exact or float arithmetic.

Conventions used throughout the package:

* All logarithms are natural, so entropies and relative entropies are in nats.
* Boltzmann's constant defaults to 1; temperatures then carry energy units.
* A distribution is in "rational" mode when every entry is a
  ``fractions.Fraction`` (arithmetic is exact end to end) and in "float" mode
  otherwise.  Operations preserve the mode of their inputs where possible.
* ``CompressedDistribution`` stores the sorted distinct values of a vector
  together with big-integer multiplicities.  Tensor powers whose dimension is
  astronomical stay polynomial-sized this way.  In float mode the distinct
  values are kept in log domain, which keeps thousand-fold tensor powers
  representable; block masses (value times multiplicity) are always ordinary
  well-scaled numbers.
"""

from __future__ import annotations

import math
import numbers
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

RATIONAL = "rational"
FLOAT = "float"

Scalar = Union[Fraction, int, float]

# |sum - 1| allowed for float-mode vectors.
FLOAT_NORM_TOL = 1e-12
# Relative tolerance for merging equal float values into one block.
MERGE_RTOL = 1e-13

__all__ = [
    "RATIONAL",
    "FLOAT",
    "Distribution",
    "ThermalSystem",
    "CompressedDistribution",
    "gibbs_state",
    "rational_gibbs_weights",
    "shannon_entropy",
    "rel_entropy",
    "rel_entropy_variance",
    "fidelity",
    "infidelity",
    "tv_distance",
    "heat_capacity",
]


def _is_rational_scalar(x) -> bool:
    return isinstance(x, numbers.Rational)


def _infer_mode(items) -> str:
    return RATIONAL if all(_is_rational_scalar(x) for x in items) else FLOAT


class Distribution:
    """A finite probability vector with an explicit arithmetic mode.

    Rational mode requires the entries to sum to exactly 1; float mode allows
    a 1e-12 slack.  Entries must be nonnegative.  Instances are immutable.
    """

    __slots__ = ("entries", "mode")

    def __init__(self, entries: Sequence[Scalar], mode: str | None = None):
        items = list(entries)
        if not items:
            raise ValueError("distribution needs at least one entry")
        if mode is None:
            mode = _infer_mode(items)
        if mode == RATIONAL:
            vals = tuple(Fraction(x) for x in items)
            if any(v < 0 for v in vals):
                raise ValueError("distribution entries must be nonnegative")
            if sum(vals) != 1:
                raise ValueError("rational distribution must sum to exactly 1")
        elif mode == FLOAT:
            vals = tuple(float(x) for x in items)
            if any(math.isnan(v) or v < 0 for v in vals):
                raise ValueError("distribution entries must be nonnegative")
            if abs(math.fsum(vals) - 1.0) > FLOAT_NORM_TOL:
                raise ValueError("float distribution must sum to 1 within 1e-12")
        else:
            raise ValueError(f"unknown arithmetic mode {mode!r}")
        object.__setattr__(self, "entries", vals)
        object.__setattr__(self, "mode", mode)

    def __setattr__(self, name, value):
        raise AttributeError("Distribution is immutable")

    @property
    def dim(self) -> int:
        return len(self.entries)

    def float_entries(self) -> tuple[float, ...]:
        return tuple(float(x) for x in self.entries)

    def as_array(self) -> np.ndarray:
        return np.array(self.float_entries())

    def sorted_desc(self) -> "Distribution":
        return Distribution(sorted(self.entries, reverse=True), mode=self.mode)

    def to_float(self) -> "Distribution":
        if self.mode == FLOAT:
            return self
        return Distribution(self.float_entries(), mode=FLOAT)

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.mode == other.mode and self.entries == other.entries

    def __hash__(self):
        return hash((self.mode, self.entries))

    def __repr__(self):
        body = ", ".join(str(x) for x in self.entries)
        return f"Distribution([{body}], mode={self.mode!r})"


@dataclass(frozen=True)
class ThermalSystem:
    """Energy levels with an inverse temperature.

    ``energies`` are stored as exact rationals; ``beta`` is a nonnegative
    rational (0 means the infinite-temperature, uniform reference).
    """

    energies: tuple
    beta: Fraction
    kB: float = 1.0

    def __post_init__(self):
        energies = tuple(Fraction(e) for e in self.energies)
        if not energies:
            raise ValueError("system needs at least one energy level")
        beta = Fraction(self.beta)
        if beta < 0:
            raise ValueError("beta must be nonnegative")
        kB = float(self.kB)
        if not kB > 0:
            raise ValueError("kB must be positive")
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "kB", kB)

    @property
    def dim(self) -> int:
        return len(self.energies)

    def float_energies(self) -> tuple[float, ...]:
        return tuple(float(e) for e in self.energies)

    @property
    def temperature(self) -> float:
        if self.beta == 0:
            return math.inf
        return 1.0 / (self.kB * float(self.beta))

    def at_temperature(self, T: float) -> "ThermalSystem":
        """Same levels at temperature ``T`` (beta = 1/(kB*T))."""
        if not T > 0:
            raise ValueError("temperature must be positive")
        return ThermalSystem(self.energies, Fraction(1.0 / (self.kB * T)), self.kB)


def _merge_sorted_rational(pairs):
    """Merge (Fraction value, int mult) pairs; returns sorted-desc lists."""
    acc: dict[Fraction, int] = {}
    for v, m in pairs:
        acc[v] = acc.get(v, 0) + m
    values = sorted(acc, reverse=True)
    return values, [acc[v] for v in values]


def _merge_sorted_logs(pairs, rtol=MERGE_RTOL):
    """Merge (log-value, int mult) pairs whose values agree to ``rtol``.

    For nearby values the log difference equals the relative difference, so
    the grouping threshold is applied directly in log domain.
    """
    finite = [(lv, m) for lv, m in pairs if lv != -math.inf]
    zero_mult = sum(m for lv, m in pairs if lv == -math.inf)
    finite.sort(key=lambda t: -t[0])
    logs: list[float] = []
    mults: list[int] = []
    for lv, m in finite:
        if logs and (logs[-1] - lv) <= rtol:
            mults[-1] += m
        else:
            logs.append(lv)
            mults.append(m)
    if zero_mult:
        logs.append(-math.inf)
        mults.append(zero_mult)
    return logs, mults


class CompressedDistribution:
    """Distinct sorted values of a probability vector with multiplicities.

    Blocks are strictly decreasing in value; multiplicities are positive
    (big) integers summing to ``total_dim``.  Rational mode stores the values
    exactly; float mode stores their natural logs (``-inf`` for zero).
    """

    __slots__ = ("mode", "mults", "total_dim", "_values", "_logs", "_ends", "_prefix")

    def __init__(self, *, mode, mults, values=None, logs=None, total_dim=None):
        mults = tuple(int(m) for m in mults)
        if any(m < 1 for m in mults):
            raise ValueError("multiplicities must be positive integers")
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "mults", mults)
        object.__setattr__(self, "total_dim", sum(mults) if total_dim is None else total_dim)
        object.__setattr__(self, "_values", values)
        object.__setattr__(self, "_logs", logs)
        object.__setattr__(self, "_ends", None)
        object.__setattr__(self, "_prefix", None)
        if self.total_dim != sum(mults):
            raise ValueError("total_dim inconsistent with multiplicities")
        self._validate()

    def __setattr__(self, name, value):
        raise AttributeError("CompressedDistribution is immutable")

    # -- construction ------------------------------------------------------

    @classmethod
    def from_pairs(cls, pairs, mode: str | None = None) -> "CompressedDistribution":
        """Build from (value, multiplicity) pairs; merges and sorts blocks."""
        pairs = [(v, int(m)) for v, m in pairs]
        if not pairs:
            raise ValueError("need at least one block")
        if mode is None:
            mode = _infer_mode([v for v, _ in pairs])
        if mode == RATIONAL:
            values, mults = _merge_sorted_rational(
                (Fraction(v), m) for v, m in pairs
            )
            if any(v < 0 for v in values):
                raise ValueError("block values must be nonnegative")
            return cls(mode=RATIONAL, mults=mults, values=tuple(values))
        logs = []
        for v, m in pairs:
            v = float(v)
            if math.isnan(v) or v < 0:
                raise ValueError("block values must be nonnegative")
            logs.append((math.log(v) if v > 0 else -math.inf, m))
        lvals, mults = _merge_sorted_logs(logs)
        return cls(mode=FLOAT, mults=mults, logs=tuple(lvals))

    @classmethod
    def from_log_pairs(cls, pairs, renormalize=True) -> "CompressedDistribution":
        """Float-mode constructor from (log-value, multiplicity) pairs.

        Long tensor products accumulate roundoff in the logs; with
        ``renormalize`` the total mass is shifted back to exactly 1 (a
        relative perturbation at machine-precision scale).
        """
        lvals, mults = _merge_sorted_logs(pairs)
        if renormalize:
            total = math.fsum(
                _block_mass_float(lv, m) for lv, m in zip(lvals, mults)
            )
            if not 0.5 < total < 2.0:
                raise ValueError(f"mass {total} too far from 1 to renormalize")
            shift = math.log(total)
            lvals = [lv - shift for lv in lvals]
        return cls(mode=FLOAT, mults=mults, logs=tuple(lvals))

    @classmethod
    def from_distribution(cls, dist: Distribution) -> "CompressedDistribution":
        return cls.from_pairs([(v, 1) for v in dist.entries], mode=dist.mode)

    @classmethod
    def uniform(cls, dim: int, mode: str = RATIONAL) -> "CompressedDistribution":
        if dim < 1:
            raise ValueError("dimension must be positive")
        if mode == RATIONAL:
            return cls(mode=RATIONAL, mults=(dim,), values=(Fraction(1, dim),))
        return cls(mode=FLOAT, mults=(dim,), logs=(-_log_int(dim),))

    # -- validation --------------------------------------------------------

    def _validate(self):
        if self.mode == RATIONAL:
            vals = self._values
            if any(v < 0 for v in vals):
                raise ValueError("block values must be nonnegative")
            if any(vals[i] <= vals[i + 1] for i in range(len(vals) - 1)):
                raise ValueError("block values must be strictly decreasing")
            if sum(v * m for v, m in zip(vals, self.mults)) != 1:
                raise ValueError("block masses must sum to exactly 1")
        else:
            logs = self._logs
            if any(math.isnan(lv) for lv in logs):
                raise ValueError("block values must be nonnegative")
            if any(logs[i] <= logs[i + 1] for i in range(len(logs) - 1)):
                raise ValueError("block values must be strictly decreasing")
            total = math.fsum(self.masses)
            if abs(total - 1.0) > FLOAT_NORM_TOL:
                raise ValueError("block masses must sum to 1 within 1e-12")

    # -- accessors ---------------------------------------------------------

    @property
    def num_blocks(self) -> int:
        return len(self.mults)

    @property
    def values(self) -> tuple:
        """Block values; float mode may underflow to 0.0 for extreme logs."""
        if self.mode == RATIONAL:
            return self._values
        return tuple(math.exp(lv) if lv != -math.inf else 0.0 for lv in self._logs)

    @property
    def log_values(self) -> tuple[float, ...]:
        if self.mode == FLOAT:
            return self._logs
        return tuple(
            math.log(v) if v > 0 else -math.inf for v in self._values
        )

    @property
    def masses(self) -> tuple:
        """Mass of each block (value times multiplicity)."""
        if self.mode == RATIONAL:
            return tuple(v * m for v, m in zip(self._values, self.mults))
        return tuple(
            _block_mass_float(lv, m) for lv, m in zip(self._logs, self.mults)
        )

    @property
    def block_ends(self) -> tuple[int, ...]:
        """Cumulative multiplicities: index (1-based) of each block's last entry."""
        if self._ends is None:
            ends = []
            acc = 0
            for m in self.mults:
                acc += m
                ends.append(acc)
            object.__setattr__(self, "_ends", tuple(ends))
        return self._ends

    def support_size(self) -> int:
        if self.mode == RATIONAL:
            return sum(m for v, m in zip(self._values, self.mults) if v > 0)
        return sum(m for lv, m in zip(self._logs, self.mults) if lv != -math.inf)

    def prefix_mass(self, k) -> Scalar:
        """Sum of the ``k`` largest entries (the Lorenz curve at ``k``)."""
        k = int(k)
        if k < 0 or k > self.total_dim:
            raise ValueError("index out of range")
        if k == 0:
            return Fraction(0) if self.mode == RATIONAL else 0.0
        if self._prefix is None:
            masses = self.masses
            prefix = []
            if self.mode == RATIONAL:
                acc = Fraction(0)
                for w in masses:
                    acc += w
                    prefix.append(acc)
            else:
                acc = 0.0
                for w in masses:
                    acc += w
                    prefix.append(acc)
            object.__setattr__(self, "_prefix", tuple(prefix))
        ends = self.block_ends
        i = bisect_left(ends, k)
        if ends[i] == k:
            return self._prefix[i]
        whole = self._prefix[i - 1] if i else (Fraction(0) if self.mode == RATIONAL else 0.0)
        start = ends[i - 1] if i else 0
        count = k - start
        if self.mode == RATIONAL:
            return whole + self._values[i] * count
        lv = self._logs[i]
        return whole + _block_mass_float(lv, count)

    def expand(self) -> list:
        """Dense sorted-descending entry list; only for small total_dim."""
        if self.total_dim > 2_000_000:
            raise ValueError("refusing to expand a huge compressed vector")
        out = []
        vals = self.values
        for v, m in zip(vals, self.mults):
            out.extend([v] * m)
        return out

    # -- combination -------------------------------------------------------

    def tensor(self, other: "CompressedDistribution") -> "CompressedDistribution":
        if self.mode != other.mode:
            raise ValueError("tensor requires matching arithmetic modes")
        if self.mode == RATIONAL:
            pairs = [
                (v1 * v2, m1 * m2)
                for v1, m1 in zip(self._values, self.mults)
                for v2, m2 in zip(other._values, other.mults)
            ]
            return CompressedDistribution.from_pairs(pairs, mode=RATIONAL)
        pairs = [
            (lv1 + lv2, m1 * m2)
            for lv1, m1 in zip(self._logs, self.mults)
            for lv2, m2 in zip(other._logs, other.mults)
        ]
        return CompressedDistribution.from_log_pairs(pairs)

    def extend_with_uniform(self, extra_dim: int) -> "CompressedDistribution":
        """Tensor with the uniform vector on ``extra_dim`` entries."""
        extra_dim = int(extra_dim)
        if extra_dim < 1:
            raise ValueError("extra dimension must be positive")
        if extra_dim == 1:
            return self
        if self.mode == RATIONAL:
            return CompressedDistribution(
                mode=RATIONAL,
                mults=[m * extra_dim for m in self.mults],
                values=tuple(v / extra_dim for v in self._values),
            )
        shift = _log_int(extra_dim)
        return CompressedDistribution(
            mode=FLOAT,
            mults=[m * extra_dim for m in self.mults],
            logs=tuple(lv - shift for lv in self._logs),
        )

    # -- misc ----------------------------------------------------------------

    @property
    def blocks(self) -> tuple:
        return tuple(zip(self.values, self.mults))

    def __eq__(self, other):
        if not isinstance(other, CompressedDistribution):
            return NotImplemented
        if self.mode != other.mode or self.mults != other.mults:
            return False
        if self.mode == RATIONAL:
            return self._values == other._values
        return self._logs == other._logs

    def __hash__(self):
        key = self._values if self.mode == RATIONAL else self._logs
        return hash((self.mode, self.mults, key))

    def __repr__(self):
        parts = ", ".join(f"{v}x{m}" for v, m in zip(self.values, self.mults))
        return f"CompressedDistribution({parts}, mode={self.mode!r})"


def _log_int(n: int) -> float:
    """log of a (possibly huge) positive integer."""
    return math.log(n)


def _block_mass_float(log_value: float, count: int) -> float:
    if log_value == -math.inf:
        return 0.0
    return math.exp(log_value + _log_int(count))


# --------------------------------------------------------------------------
# Thermal states
# --------------------------------------------------------------------------


def rational_gibbs_weights(system: ThermalSystem, max_denominator: int = 10**6):
    """Integer Boltzmann weights approximating exp(-beta*E_i).

    Each weight is approximated by a continued-fraction rational with
    denominator at most ``max_denominator``; the weights are then put over a
    common denominator and reduced, so the induced thermal distribution is
    ``numerators[i] / sum(numerators)`` exactly.  Returns ``(numerators,
    total, error)`` where ``error`` is the largest absolute deviation of the
    induced distribution from the float-precision thermal state.  Weights
    that would round to zero are clamped to one part in the total.
    """
    if max_denominator < 1:
        raise ValueError("max_denominator must be positive")
    beta = float(system.beta)
    exponents = [-beta * e for e in system.float_energies()]
    shift = max(exponents)
    weights = [math.exp(x - shift) for x in exponents]
    fracs = []
    for w in weights:
        f = Fraction(w).limit_denominator(max_denominator)
        if f == 0:
            f = Fraction(1, max_denominator)
        fracs.append(f)
    common = math.lcm(*[f.denominator for f in fracs])
    nums = [f.numerator * (common // f.denominator) for f in fracs]
    g = math.gcd(*nums)
    nums = [x // g for x in nums]
    total = sum(nums)
    wsum = math.fsum(weights)
    error = max(abs(w / wsum - n / total) for w, n in zip(weights, nums))
    return nums, total, error


def gibbs_state(
    system: ThermalSystem, mode: str = FLOAT, max_denominator: int = 10**6
) -> Distribution:
    """Thermal distribution exp(-beta*E_i)/Z.

    Float mode evaluates the Boltzmann weights directly.  Rational mode
    approximates them on a common-denominator grid (see
    ``rational_gibbs_weights``) so that downstream arithmetic stays exact.
    """
    if mode == FLOAT:
        beta = float(system.beta)
        exponents = [-beta * e for e in system.float_energies()]
        shift = max(exponents)
        weights = [math.exp(x - shift) for x in exponents]
        z = math.fsum(weights)
        return Distribution([w / z for w in weights], mode=FLOAT)
    if mode == RATIONAL:
        nums, total, _ = rational_gibbs_weights(system, max_denominator)
        return Distribution([Fraction(x, total) for x in nums], mode=RATIONAL)
    raise ValueError(f"unknown arithmetic mode {mode!r}")


# --------------------------------------------------------------------------
# Information measures
# --------------------------------------------------------------------------


def _check_same_dim(p: Distribution, q: Distribution):
    if p.dim != q.dim:
        raise ValueError("distributions must have equal dimension")


def shannon_entropy(p: Distribution) -> float:
    """Entropy in nats, with 0*log(0) = 0."""
    return -math.fsum(
        x * math.log(x) for x in p.float_entries() if x > 0.0
    )


def rel_entropy(p: Distribution, q: Distribution) -> float:
    """Relative entropy sum p_i log(p_i/q_i) in nats; +inf off support."""
    _check_same_dim(p, q)
    pf = p.float_entries()
    qf = q.float_entries()
    if any(pi > 0.0 and qi == 0.0 for pi, qi in zip(pf, qf)):
        return math.inf
    return math.fsum(
        pi * _log_ratio(p, q, i)
        for i, pi in enumerate(pf)
        if pi > 0.0
    )


def _log_ratio(p: Distribution, q: Distribution, i: int) -> float:
    """log(p_i/q_i), using the exact rational ratio when available."""
    if p.mode == RATIONAL and q.mode == RATIONAL:
        return math.log(p.entries[i] / q.entries[i])
    return math.log(float(p.entries[i])) - math.log(float(q.entries[i]))


def rel_entropy_variance(p: Distribution, q: Distribution) -> float:
    """Variance of the log-likelihood ratio log(p_i/q_i) under p."""
    _check_same_dim(p, q)
    pf = p.float_entries()
    qf = q.float_entries()
    if any(pi > 0.0 and qi == 0.0 for pi, qi in zip(pf, qf)):
        raise ValueError("support of p must lie inside support of q")
    ratios = [
        (pi, _log_ratio(p, q, i))
        for i, (pi, qi) in enumerate(zip(pf, qf))
        if pi > 0.0
    ]
    mean = math.fsum(pi * r for pi, r in ratios)
    return math.fsum(pi * (r - mean) ** 2 for pi, r in ratios)


def fidelity(p: Distribution, q: Distribution) -> float:
    """Squared Bhattacharyya overlap (sum of sqrt(p_i q_i))**2."""
    _check_same_dim(p, q)
    s = math.fsum(
        math.sqrt(float(pi) * float(qi))
        for pi, qi in zip(p.entries, q.entries)
    )
    return min(s * s, 1.0)


def infidelity(p: Distribution, q: Distribution) -> float:
    return max(1.0 - fidelity(p, q), 0.0)


def tv_distance(p: Distribution, q: Distribution):
    """Total variation distance; exact Fraction when both inputs are rational."""
    _check_same_dim(p, q)
    if p.mode == RATIONAL and q.mode == RATIONAL:
        return sum(abs(pi - qi) for pi, qi in zip(p.entries, q.entries)) / 2
    return 0.5 * math.fsum(
        abs(float(pi) - float(qi)) for pi, qi in zip(p.entries, q.entries)
    )


def heat_capacity(system: ThermalSystem, T: float) -> float:
    """Heat capacity Var(E)/(kB*T^2) of the thermal state at temperature T."""
    if not T > 0:
        raise ValueError("temperature must be positive")
    gamma = gibbs_state(system.at_temperature(T), mode=FLOAT)
    energies = system.float_energies()
    mean = math.fsum(g * e for g, e in zip(gamma.entries, energies))
    var = math.fsum(g * (e - mean) ** 2 for g, e in zip(gamma.entries, energies))
    return var / (system.kB * T * T)
