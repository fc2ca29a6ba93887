"""Optimal approximate conversion between single copies.

Given sorted embedded vectors p and q, the closest-to-p vector that
majorises q has a piecewise-proportional form: there are pivot indices
D+1 = l_0 > l_1 > ... > l_N = 1 and ratios r_1 < ... < r_N such that the
optimum equals r_j * p_i on each index range [l_j, l_{j-1}).  Pivot l_j is
the argmin over k < l_{j-1} of the segment-mass ratio

    (sum of q over [k, l_{j-1}))  /  (sum of p over [k, l_{j-1})),

with ties broken toward the smallest index and zero denominators treated as
+infinity.  The achieved fidelity is (sum_j sqrt(Q_j * P_j))^2 with Q_j, P_j
the segment masses of q and p.

Both vectors are piecewise constant on the merged set of their block
intervals, and the segment-mass ratio is a monotone Moebius function of k
inside any interval on which both are constant, so the argmin is always
attained at an interval edge.  Restricting candidates to edges makes the
construction quadratic in the number of blocks instead of the (possibly
astronomical) dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from .distributions import (
    FLOAT,
    RATIONAL,
    CompressedDistribution,
    Distribution,
)
from .majorization import (
    EmbeddingSpec,
    _pad_pair,
    embed,
    embed_dense,
    majorizes,
    thermo_majorizes,
    unembed,
)

__all__ = [
    "MajorizationWitness",
    "optimal_majorizing",
    "min_interconversion_infidelity",
    "smoothed_target",
    "TVWitness",
    "tv_pre_witness",
]

# Relative tolerance for float ratio comparisons (cross-multiplied).
_RATIO_RTOL = 1e-14


@dataclass(frozen=True)
class MajorizationWitness:
    """Optimal majoriser of q at minimal distance from p.

    ``pivots`` are the 1-based indices l_1 > l_2 > ... > l_N (big integers);
    ``ratios`` the matching scale factors, strictly increasing.  In rational
    mode ``exact_fidelity`` carries the fidelity as an exact Fraction
    whenever it is expressible as one (at most one nonzero overlap segment,
    or all segment products perfect squares); otherwise it is None and
    ``fidelity_value`` is the float evaluation.
    """

    tilde_p: CompressedDistribution
    pivots: tuple
    ratios: tuple
    fidelity_value: float
    exact_fidelity: Optional[Fraction] = None


def _segment_masses(dist: CompressedDistribution, edges):
    """Mass of each [edges[s], edges[s+1]) range; constant-value ranges."""
    out = []
    values = dist._values if dist.mode == RATIONAL else dist._logs
    ends = dist.block_ends
    bi = 0
    for s in range(len(edges) - 1):
        lo, hi = edges[s], edges[s + 1]
        while ends[bi] < lo:
            bi += 1
        # the whole range lies inside block bi: merged edges include every
        # block start of dist, so no range straddles one of its boundaries
        count = hi - lo
        if dist.mode == RATIONAL:
            out.append(values[bi] * count)
        else:
            lv = values[bi]
            out.append(0.0 if lv == -math.inf else math.exp(lv + math.log(count)))
    return out


def _ratio_less(dq_a, dp_a, dq_b, dp_b, rational: bool) -> bool:
    """Is dq_a/dp_a strictly smaller than dq_b/dp_b (0 denominator = +inf)?"""
    a_inf = dp_a == 0
    b_inf = dp_b == 0
    if a_inf:
        return False
    if b_inf:
        return True
    lhs = dq_a * dp_b
    rhs = dq_b * dp_a
    if rational:
        return lhs < rhs
    scale = max(abs(lhs), abs(rhs))
    return lhs < rhs - _RATIO_RTOL * scale


def optimal_majorizing(
    p: CompressedDistribution, q: CompressedDistribution
) -> MajorizationWitness:
    """Closest-to-p majoriser of q over the sorted embedded simplex.

    Inputs must share an arithmetic mode; a shorter vector is zero-padded.
    Runs in O(t^2) ratio comparisons where t is the merged block count.
    """
    if p.mode != q.mode:
        raise ValueError("operands must share an arithmetic mode")
    p, q = _pad_pair(p, q)
    rational = p.mode == RATIONAL

    # 1-based start indices of every block of either vector, plus sentinel.
    total = p.total_dim
    starts = {1, total + 1}
    for dist in (p, q):
        prev = 1
        for end in dist.block_ends:
            starts.add(prev)
            prev = end + 1
    edges = sorted(starts)
    t = len(edges) - 1  # edges[t] is the sentinel total+1

    seg_p = _segment_masses(p, edges)
    seg_q = _segment_masses(q, edges)

    # Suffix masses at each edge; built tail-first so small tails stay sharp.
    zero = Fraction(0) if rational else 0.0
    ep = [zero] * (t + 1)
    eq = [zero] * (t + 1)
    for s in range(t - 1, -1, -1):
        ep[s] = ep[s + 1] + seg_p[s]
        eq[s] = eq[s + 1] + seg_q[s]

    pivot_idx = []
    l_idx = t
    while l_idx > 0:
        best = 0
        best_dq = eq[0] - eq[l_idx]
        best_dp = ep[0] - ep[l_idx]
        for s in range(1, l_idx):
            dq = eq[s] - eq[l_idx]
            dp = ep[s] - ep[l_idx]
            if _ratio_less(dq, dp, best_dq, best_dp, rational):
                best, best_dq, best_dp = s, dq, dp
        pivot_idx.append(best)
        l_idx = best

    # Segment masses recomputed by direct summation (avoids cancellation).
    segments = []  # (edge index lo, edge index hi, Q mass, P mass)
    hi = t
    for lo in pivot_idx:
        if rational:
            dq = sum(seg_q[lo:hi], Fraction(0))
            dp = sum(seg_p[lo:hi], Fraction(0))
        else:
            dq = math.fsum(seg_q[lo:hi])
            dp = math.fsum(seg_p[lo:hi])
        segments.append((lo, hi, dq, dp))
        hi = lo

    ratios = []
    for _, _, dq, dp in segments:
        if dp == 0:
            raise AssertionError("chosen pivot segment carries no p mass")
        ratios.append(dq / dp if rational else dq / dp)

    tilde_p = _build_scaled(p, edges, segments, ratios, rational)

    overlaps = [dq * dp for _, _, dq, dp in segments]
    root_sum = math.fsum(math.sqrt(float(x)) for x in overlaps)
    fidelity_value = min(max(root_sum * root_sum, 0.0), 1.0)
    exact = _exact_fidelity(overlaps) if rational else None
    if exact is not None:
        fidelity_value = min(max(float(exact), 0.0), 1.0)

    pivots = tuple(edges[i] for i in pivot_idx)
    return MajorizationWitness(
        tilde_p=tilde_p,
        pivots=pivots,
        ratios=tuple(ratios),
        fidelity_value=fidelity_value,
        exact_fidelity=exact,
    )


def _build_scaled(p, edges, segments, ratios, rational):
    """Assemble r_j * p over each pivot segment into a compressed vector."""
    values = p._values if rational else p._logs
    ends = p.block_ends
    pairs = []
    for (lo, hi, _, _), r in zip(segments, ratios):
        pos = edges[lo]
        stop = edges[hi]  # exclusive
        bi = 0
        while ends[bi] < pos:
            bi += 1
        while pos < stop:
            block_end = min(ends[bi], stop - 1)
            count = block_end - pos + 1
            if rational:
                pairs.append((values[bi] * r, count))
            else:
                lv = values[bi]
                if lv == -math.inf or r == 0.0:
                    pairs.append((-math.inf, count))
                else:
                    pairs.append((lv + math.log(r), count))
            pos = block_end + 1
            bi += 1
    if rational:
        return CompressedDistribution.from_pairs(pairs, mode=RATIONAL)
    return CompressedDistribution.from_log_pairs(pairs, renormalize=True)


def _exact_fidelity(overlaps) -> Optional[Fraction]:
    nonzero = [Fraction(x) for x in overlaps if x != 0]
    if not nonzero:
        return Fraction(0)
    if len(nonzero) == 1:
        return nonzero[0]
    roots = []
    for x in nonzero:
        rn = math.isqrt(x.numerator)
        rd = math.isqrt(x.denominator)
        if rn * rn != x.numerator or rd * rd != x.denominator:
            return None
        roots.append(Fraction(rn, rd))
    s = sum(roots, Fraction(0))
    return s * s


def min_interconversion_infidelity(
    p: Distribution, q: Distribution, spec: EmbeddingSpec
) -> float:
    """Smallest infidelity with which thermal processing maps p onto q."""
    value, _ = _infidelity_details(embed(p, spec), embed(q, spec))
    return value


def _infidelity_details(
    p_hat: CompressedDistribution, q_hat: CompressedDistribution
):
    """(float infidelity, exact Fraction or None) for embedded vectors."""
    if majorizes(p_hat, q_hat):
        return 0.0, Fraction(0)
    w = optimal_majorizing(p_hat, q_hat)
    if w.exact_fidelity is not None:
        exact = 1 - w.exact_fidelity
        return max(float(exact), 0.0), exact
    return max(1.0 - w.fidelity_value, 0.0), None


# --------------------------------------------------------------------------
# Realising the optimum as a target-side smoothing
# --------------------------------------------------------------------------


def smoothed_target(
    p: Distribution, q: Distribution, spec: EmbeddingSpec
) -> Distribution:
    """A target q~ reachable from p exactly, with the optimal infidelity to q.

    The optimal majoriser r*p of the embedded target is carried onto the
    embedded target by a finite chain of pairwise mixing (T-transform)
    steps; applying the same chain to the embedded p and unembedding yields
    a distribution q~ with p above q~ in the thermal order and
    F(q, q~) equal to the optimum.  Work is dense in the embedded dimension,
    so this is intended for single-copy instances.
    """
    if p.dim != q.dim or p.dim != spec.dim:
        raise ValueError("distributions and embedding must share a dimension")
    if thermo_majorizes(p, q, spec):
        return q
    d_total = spec.common_denominator
    if d_total > 20000:
        raise ValueError("embedded dimension too large for dense smoothing")
    rational = p.mode == RATIONAL and q.mode == RATIONAL

    witness = optimal_majorizing(embed(p, spec), embed(q, spec))

    p_dense = embed_dense(p, spec)
    q_dense = embed_dense(q, spec)
    q_order = sorted(range(d_total), key=lambda i: (-float(q_dense[i]), i))
    b = [q_dense[i] for i in q_order]
    x = sorted(p_dense, reverse=True)
    a = witness.tilde_p.expand()
    if not rational:
        a = [float(v) for v in a]
        b = [float(v) for v in b]
        x = [float(v) for v in x]

    _pull_onto(a, b, x, rational)

    # x now sits in the sorted-q frame; send entries back to level order.
    q_smoothed = [None] * d_total
    for rank, orig in enumerate(q_order):
        q_smoothed[orig] = x[rank]
    if not rational:
        total = math.fsum(q_smoothed)
        q_smoothed = [v / total for v in q_smoothed]
    return unembed(q_smoothed, spec)


def _pull_onto(a, b, x, rational):
    """Mix pairs of entries of ``a`` until it equals ``b``; mirror on ``x``.

    Requires a majorising b, both sorted descending.  Each step moves mass
    from the last over-target entry to the first under-target entry after
    it, matching at least one coordinate, so at most len(a) steps happen.
    """
    n = len(a)
    tol = 0 if rational else 1e-15
    for _ in range(2 * n + 4):
        i = None
        for k in range(n - 1, -1, -1):
            if a[k] - b[k] > tol:
                i = k
                break
        if i is None:
            return
        j = None
        for k in range(i + 1, n):
            if b[k] - a[k] > tol:
                j = k
                break
        if j is None:
            raise AssertionError("mass surplus with no deficit below it")
        delta = min(a[i] - b[i], b[j] - a[j])
        lam = 1 - delta / (a[i] - a[j])
        xi, xj = x[i], x[j]
        x[i] = lam * xi + (1 - lam) * xj
        x[j] = (1 - lam) * xi + lam * xj
        a[i] = a[i] - delta
        a[j] = a[j] + delta
    raise RuntimeError("pairwise mixing did not converge")


# --------------------------------------------------------------------------
# Total-variation pre-processing witness
# --------------------------------------------------------------------------


class TVWitness(NamedTuple):
    distribution: Distribution
    achieved_distance: object  # Fraction in rational mode, float otherwise


def tv_pre_witness(p: Distribution, q: Distribution, epsilon) -> TVWitness:
    """Truncate-and-boost witness for conversion after TV smoothing of p.

    Keeps the largest M entries of p, where M is the largest index whose
    descending prefix sum stays at or below 1 - epsilon, boosts the top
    entry by epsilon and tops up entry M so the result is normalised.  The
    returned distance between p and the witness is sum of the dropped tail
    entries, which can exceed epsilon; it is reported rather than assumed.
    """
    rational = p.mode == RATIONAL
    eps = Fraction(epsilon) if rational else float(epsilon)
    if eps < 0 or eps >= 1:
        raise ValueError("epsilon must lie in [0, 1)")
    order = sorted(range(p.dim), key=lambda i: (-float(p.entries[i]), i))
    desc = [p.entries[i] for i in order]
    limit = 1 - eps
    acc = desc[0]
    if acc > limit:
        raise ValueError("no valid truncation index: top entry exceeds 1 - epsilon")
    m_count = 1
    while m_count < len(desc) and acc + desc[m_count] <= limit:
        acc += desc[m_count]
        m_count += 1
    # acc = prefix sum of the kept entries
    kept = list(desc[:m_count])
    tail = (1 - acc) if rational else math.fsum(float(v) for v in desc[m_count:])
    kept[0] = kept[0] + eps
    kept[m_count - 1] = kept[m_count - 1] + (limit - acc)
    witness_desc = kept + [Fraction(0) if rational else 0.0] * (len(desc) - m_count)
    out = [None] * p.dim
    for rank, orig in enumerate(order):
        out[orig] = witness_desc[rank]
    witness = Distribution(out, mode=p.mode)
    if not majorizes(witness, q):
        raise ValueError(
            "witness fails to majorise the target; "
            "the TV-feasibility precondition does not hold"
        )
    achieved = tail if rational else float(tail)
    return TVWitness(witness, achieved)
