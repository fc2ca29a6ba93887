"""Majorisation, thermomajorisation, and the Gibbs embedding.

A thermal distribution with rational weights ``D_i / D`` induces an embedding
that splits level ``i`` of a vector into ``D_i`` equal parts.  The embedded
image of the thermal state itself is uniform, so checking which states a
Gibbs-preserving stochastic map can reach reduces to ordinary majorisation
between embedded vectors.  Everything here works on compressed vectors, so
the embedded dimension may be astronomically large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .distributions import (
    FLOAT,
    RATIONAL,
    CompressedDistribution,
    Distribution,
    ThermalSystem,
    rational_gibbs_weights,
)

__all__ = [
    "EmbeddingSpec",
    "embed",
    "embed_dense",
    "unembed",
    "majorizes",
    "thermo_majorizes",
    "lorenz_curve",
]

VectorLike = Union[Distribution, CompressedDistribution]


@dataclass(frozen=True)
class EmbeddingSpec:
    """Rational thermal weights: level ``i`` carries ``gibbs_numerators[i]``
    of the ``common_denominator`` uniform slots.

    ``approx_error`` records the largest deviation of the rational thermal
    state from the float-precision one when the spec was built from a system
    or from inexact probabilities (0 for exact input).
    """

    gibbs_numerators: tuple[int, ...]
    common_denominator: int
    approx_error: float = 0.0

    def __post_init__(self):
        nums = tuple(int(x) for x in self.gibbs_numerators)
        if not nums:
            raise ValueError("need at least one level")
        if any(x < 1 for x in nums):
            raise ValueError("gibbs numerators must be positive integers")
        denom = int(self.common_denominator)
        if denom != sum(nums):
            raise ValueError("common denominator must equal the numerator sum")
        object.__setattr__(self, "gibbs_numerators", nums)
        object.__setattr__(self, "common_denominator", denom)

    @property
    def dim(self) -> int:
        return len(self.gibbs_numerators)

    def gibbs_distribution(self, mode: str = RATIONAL) -> Distribution:
        d = self.common_denominator
        if mode == RATIONAL:
            return Distribution(
                [Fraction(x, d) for x in self.gibbs_numerators], mode=RATIONAL
            )
        return Distribution(
            [x / d for x in self.gibbs_numerators], mode=FLOAT
        )

    @classmethod
    def uniform(cls, dim: int) -> "EmbeddingSpec":
        """The infinite-temperature spec: every level gets one slot."""
        return cls((1,) * dim, dim)

    @classmethod
    def from_probabilities(
        cls, gamma: Sequence, max_denominator: int = 10**6
    ) -> "EmbeddingSpec":
        """Approximate a thermal distribution by rationals on a common grid.

        Exact rational input passes through unchanged (zero reported error);
        floats are approximated entry-wise by continued fractions with
        denominators at most ``max_denominator``.
        """
        gamma = list(gamma)
        if any(not float(g) > 0 for g in gamma):
            raise ValueError("thermal weights must be strictly positive")
        fracs = []
        for g in gamma:
            f = Fraction(g) if isinstance(g, (int, Fraction)) else Fraction(
                float(g)
            ).limit_denominator(max_denominator)
            if f == 0:
                f = Fraction(1, max_denominator)
            fracs.append(f)
        common = math.lcm(*[f.denominator for f in fracs])
        nums = [f.numerator * (common // f.denominator) for f in fracs]
        g = math.gcd(*nums)
        nums = [x // g for x in nums]
        total = sum(nums)
        error = max(
            abs(float(x) / math.fsum(float(y) for y in gamma) - n / total)
            for x, n in zip(gamma, nums)
        )
        return cls(tuple(nums), total, error)

    @classmethod
    def from_system(
        cls, system: ThermalSystem, max_denominator: int = 10**6
    ) -> "EmbeddingSpec":
        nums, total, error = rational_gibbs_weights(system, max_denominator)
        return cls(tuple(nums), total, error)


def embed(p: Distribution, spec: EmbeddingSpec) -> CompressedDistribution:
    """Split entry ``i`` into ``D_i`` equal parts; result sorted and merged."""
    if p.dim != spec.dim:
        raise ValueError("distribution and embedding dimension differ")
    if p.mode == RATIONAL:
        pairs = [
            (v / d, d) for v, d in zip(p.entries, spec.gibbs_numerators)
        ]
        return CompressedDistribution.from_pairs(pairs, mode=RATIONAL)
    log_pairs = []
    for v, d in zip(p.entries, spec.gibbs_numerators):
        lv = math.log(v) - math.log(d) if v > 0 else -math.inf
        log_pairs.append((lv, d))
    return CompressedDistribution.from_log_pairs(log_pairs, renormalize=False)


def embed_dense(p: Distribution, spec: EmbeddingSpec) -> list:
    """Level-ordered dense embedded vector (entry i repeated D_i times)."""
    if p.dim != spec.dim:
        raise ValueError("distribution and embedding dimension differ")
    out = []
    for v, d in zip(p.entries, spec.gibbs_numerators):
        out.extend([v / d if p.mode == RATIONAL else float(v) / d] * d)
    return out


def unembed(vec: Sequence, spec: EmbeddingSpec) -> Distribution:
    """Sum each level's block of a dense, level-ordered embedded vector."""
    vec = list(vec)
    if len(vec) != spec.common_denominator:
        raise ValueError("embedded vector length must equal the denominator")
    out = []
    pos = 0
    rational = all(isinstance(x, (int, Fraction)) for x in vec)
    for d in spec.gibbs_numerators:
        chunk = vec[pos : pos + d]
        out.append(sum(chunk) if rational else math.fsum(float(x) for x in chunk))
        pos += d
    return Distribution(out)


def _as_compressed(x: VectorLike) -> CompressedDistribution:
    if isinstance(x, CompressedDistribution):
        return x
    if not isinstance(x, Distribution):
        # bare sequence: wrap, inferring the mode from the entries
        x = Distribution(list(x))
    return CompressedDistribution.from_distribution(x)


def _pad_pair(p: CompressedDistribution, q: CompressedDistribution):
    """Zero-pad the shorter vector so both have equal total dimension."""
    target = max(p.total_dim, q.total_dim)
    return _pad_to(p, target), _pad_to(q, target)


def _pad_to(x: CompressedDistribution, target: int) -> CompressedDistribution:
    extra = target - x.total_dim
    if extra == 0:
        return x
    if extra < 0:
        raise ValueError("cannot shrink a compressed vector")
    if x.mode == RATIONAL:
        values = list(x._values)
        mults = list(x.mults)
        if values[-1] == 0:
            mults[-1] += extra
        else:
            values.append(Fraction(0))
            mults.append(extra)
        return CompressedDistribution(mode=RATIONAL, mults=mults, values=tuple(values))
    logs = list(x._logs)
    mults = list(x.mults)
    if logs[-1] == -math.inf:
        mults[-1] += extra
    else:
        logs.append(-math.inf)
        mults.append(extra)
    return CompressedDistribution(mode=FLOAT, mults=mults, logs=tuple(logs))


def majorizes(p: VectorLike, q: VectorLike) -> bool:
    """True when sorted prefix sums of ``p`` dominate those of ``q``.

    Dimensions may differ; the shorter vector is padded with zeros.  The
    Lorenz curves are piecewise linear, so domination is checked at the
    merged set of block boundaries.  Float-mode comparisons are strict.
    """
    pc, qc = _coerce_mode_pair(_as_compressed(p), _as_compressed(q))
    pc, qc = _pad_pair(pc, qc)
    boundaries = sorted(set(pc.block_ends) | set(qc.block_ends))
    for k in boundaries:
        if pc.prefix_mass(k) < qc.prefix_mass(k):
            return False
    return True


def _coerce_mode_pair(p: CompressedDistribution, q: CompressedDistribution):
    if p.mode == q.mode:
        return p, q
    return _to_float(p), _to_float(q)


def _to_float(x: CompressedDistribution) -> CompressedDistribution:
    if x.mode == FLOAT:
        return x
    return CompressedDistribution(mode=FLOAT, mults=x.mults, logs=x.log_values)


def thermo_majorizes(p: Distribution, q: Distribution, spec: EmbeddingSpec) -> bool:
    """Reachability of ``q`` from ``p`` under thermal processing: embedded
    majorisation.  With the uniform spec this is ordinary majorisation."""
    if p.dim != q.dim:
        raise ValueError("distributions must have equal dimension")
    return majorizes(embed(p, spec), embed(q, spec))


def lorenz_curve(p: VectorLike, k) -> Union[Fraction, float]:
    """Sum of the ``k`` largest embedded entries; exact in rational mode.

    ``k`` may be any big integer between 0 and the total dimension.  Runs in
    O(number of blocks).
    """
    return _as_compressed(p).prefix_mass(k)
