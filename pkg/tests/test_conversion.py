"""Single-shot conversion optima and their witnesses."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from thermoconv import (
    CompressedDistribution,
    Distribution,
    EmbeddingSpec,
    embed,
    infidelity,
    majorizes,
    min_interconversion_infidelity,
    optimal_majorizing,
    smoothed_target,
    thermo_majorizes,
    tv_pre_witness,
)
from thermoconv.distributions import FLOAT, RATIONAL

F = Fraction

TWO_LEVEL_OPTIMUM = (3 - 2 * math.sqrt(2)) / 6


def _cd(entries):
    return CompressedDistribution.from_pairs([(v, 1) for v in entries])


# ------------------------------------------------------- optimal majoriser

def test_identity_conversion_is_free():
    u4 = CompressedDistribution.uniform(4)
    w = optimal_majorizing(u4, u4)
    assert w.tilde_p.blocks == u4.blocks
    assert w.exact_fidelity == 1
    assert w.fidelity_value == 1.0


def test_flat_target_witness_is_the_target_itself():
    u4 = CompressedDistribution.uniform(4)
    q = CompressedDistribution.from_pairs([(F(1, 2), 2), (F(0), 2)])
    w = optimal_majorizing(u4, q)
    assert w.tilde_p.blocks == q.blocks
    assert w.exact_fidelity == F(1, 2)
    assert w.fidelity_value == pytest.approx(0.5, abs=1e-15)


def test_mode_mismatch_rejected():
    u2 = CompressedDistribution.uniform(2)
    f2 = CompressedDistribution.from_log_pairs([(math.log(0.5), 2)])
    with pytest.raises(ValueError):
        optimal_majorizing(u2, f2)


def test_two_level_embedded_witness_exact(demo_p):
    # pure state into the flat pair under the (3,1)/4 embedding
    spec = EmbeddingSpec((3, 1), 4)
    p = Distribution([F(1), F(0)])
    q = Distribution([F(1, 2), F(1, 2)])
    w = optimal_majorizing(embed(p, spec), embed(q, spec))
    assert w.tilde_p.expand() == [F(1, 2), F(1, 4), F(1, 4), F(0)]
    assert w.fidelity_value == pytest.approx(1 - TWO_LEVEL_OPTIMUM, abs=1e-12)
    assert w.exact_fidelity is None  # the root is irrational here


@st.composite
def rational_cd_pairs(draw, max_dim=6):
    dim = draw(st.integers(min_value=2, max_value=max_dim))
    out = []
    for _ in range(2):
        weights = draw(
            st.lists(st.integers(min_value=0, max_value=25), min_size=dim, max_size=dim)
        )
        if sum(weights) == 0:
            weights[0] = 1
        total = sum(weights)
        out.append([F(w, total) for w in sorted(weights, reverse=True)])
    return _cd(out[0]), _cd(out[1])


@settings(max_examples=60, deadline=None)
@given(pair=rational_cd_pairs())
def test_witness_majorises_target_and_reports_its_own_fidelity(pair):
    p_hat, q_hat = pair
    w = optimal_majorizing(p_hat, q_hat)
    assert majorizes(w.tilde_p, q_hat)
    # the reported value is the Bhattacharyya fidelity between p and tilde
    pv = p_hat.expand()
    tv = w.tilde_p.expand()
    pad = max(len(pv), len(tv))
    pv += [F(0)] * (pad - len(pv))
    tv += [F(0)] * (pad - len(tv))
    root = math.fsum(math.sqrt(float(a) * float(b)) for a, b in zip(pv, tv))
    assert w.fidelity_value == pytest.approx(root * root, abs=1e-12)
    if w.exact_fidelity is not None:
        assert w.fidelity_value == pytest.approx(float(w.exact_fidelity), abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(pair=rational_cd_pairs())
def test_witness_is_piecewise_proportional_to_p(pair):
    # between consecutive pivots the witness rescales p by one constant
    p_hat, q_hat = pair
    w = optimal_majorizing(p_hat, q_hat)
    pv = p_hat.expand()
    tv = w.tilde_p.expand()
    pad = max(len(pv), len(tv))
    pv += [F(0)] * (pad - len(pv))
    tv += [F(0)] * (pad - len(tv))
    starts = {int(k) - 1 for k in w.pivots}  # pivots are 1-based segment starts
    bounds = sorted(starts | {0, pad})
    for lo, hi in zip(bounds, bounds[1:]):
        ratios = {tv[i] / pv[i] for i in range(lo, hi) if pv[i] != 0}
        assert len(ratios) <= 1
        assert all(tv[i] == 0 for i in range(lo, hi) if pv[i] == 0)


def test_matches_dense_recursion_exactly(rng):
    for _ in range(40):
        dim = int(rng.integers(2, 7))
        p = sorted(oracles.random_rational_distribution(rng, dim), reverse=True)
        q = sorted(oracles.random_rational_distribution(rng, dim), reverse=True)
        w = optimal_majorizing(_cd(p), _cd(q))
        tilde, fid = oracles.dense_optimal_majorizing(p, q)
        got = w.tilde_p.expand()
        got += [F(0)] * (dim - len(got))
        assert got == tilde
        assert w.fidelity_value == pytest.approx(fid, abs=1e-12)


def test_matches_convex_programming_optimum(rng):
    # independent route: maximise fidelity over the majorising polytope
    for _ in range(6):
        dim = int(rng.integers(2, 5))
        p = sorted(oracles.random_float_distribution(rng, dim, zeros=False), reverse=True)
        q = sorted(oracles.random_float_distribution(rng, dim, zeros=False), reverse=True)
        w = optimal_majorizing(
            CompressedDistribution.from_pairs([(v, 1) for v in p], mode=FLOAT),
            CompressedDistribution.from_pairs([(v, 1) for v in q], mode=FLOAT),
        )
        ref = oracles.convex_pre_fidelity(p, q)
        assert w.fidelity_value == pytest.approx(ref, abs=1e-7)


# ------------------------------------------------- minimum infidelity

def test_zero_infidelity_iff_reachable(demo_spec):
    p = Distribution([F(2, 3), F(1, 3)])
    gamma = demo_spec.gibbs_distribution()
    assert min_interconversion_infidelity(p, gamma, demo_spec) == 0.0
    assert thermo_majorizes(p, gamma, demo_spec)
    q = Distribution([F(9, 10), F(1, 10)])
    assert not thermo_majorizes(p, q, demo_spec)
    assert min_interconversion_infidelity(p, q, demo_spec) > 0.0


def test_two_level_reference_infidelity():
    spec = EmbeddingSpec((3, 1), 4)
    p = Distribution([F(1), F(0)])
    q = Distribution([F(1, 2), F(1, 2)])
    assert min_interconversion_infidelity(p, q, spec) == pytest.approx(
        TWO_LEVEL_OPTIMUM, abs=1e-12
    )


def test_infidelity_monotone_along_thermal_chain():
    # targets that climb the thermal order (each reaches the one before it)
    # can only get harder from a fixed start
    spec = EmbeddingSpec((3, 1), 4)
    p = Distribution([F(3, 5), F(2, 5)])
    targets = [
        Distribution([F(num, 100), F(100 - num, 100)])
        for num in (75, 80, 85, 90, 95, 100)
    ]
    for harder, easier in zip(targets[1:], targets):
        assert thermo_majorizes(harder, easier, spec)
    values = [min_interconversion_infidelity(p, q, spec) for q in targets]
    assert values == sorted(values)
    assert values[0] == 0.0  # the thermal state itself is free
    assert values[-1] > 0.0


# ------------------------------------------------------- smoothed target

def test_smoothed_target_returns_q_when_reachable():
    spec = EmbeddingSpec((3, 1), 4)
    p = Distribution([F(1), F(0)])
    q = Distribution([F(3, 4), F(1, 4)])
    assert smoothed_target(p, q, spec).entries == q.entries


def test_smoothed_target_realises_the_optimum():
    spec = EmbeddingSpec((3, 1), 4)
    p = Distribution([F(1), F(0)])
    q = Distribution([F(1, 2), F(1, 2)])
    q_tilde = smoothed_target(p, q, spec)
    assert q_tilde.entries == (F(2, 3), F(1, 3))
    assert thermo_majorizes(p, q_tilde, spec)
    assert infidelity(q, q_tilde) == pytest.approx(TWO_LEVEL_OPTIMUM, abs=1e-12)


def test_smoothed_target_random_instances_are_consistent(rng):
    spec = EmbeddingSpec((3, 2, 1), 6)
    for _ in range(20):
        p = Distribution(oracles.random_rational_distribution(rng, 3, zeros=False))
        q = Distribution(oracles.random_rational_distribution(rng, 3, zeros=False))
        q_tilde = smoothed_target(p, q, spec)
        assert thermo_majorizes(p, q_tilde, spec)
        opt = min_interconversion_infidelity(p, q, spec)
        assert infidelity(q, q_tilde) == pytest.approx(opt, abs=1e-9)


def test_smoothed_target_refuses_huge_embeddings():
    spec = EmbeddingSpec((20001, 9999), 30000)
    p = Distribution([F(1), F(0)])
    q = Distribution([F(0), F(1)])  # unreachable, so the dense path is needed
    with pytest.raises(ValueError):
        smoothed_target(p, q, spec)


# ----------------------------------------------------------- TV witness

def test_tv_witness_truncate_and_boost_float():
    w = tv_pre_witness(Distribution([0.5, 0.3, 0.2]), Distribution([0.5, 0.5, 0.0]), 0.1)
    assert w.distribution.entries == pytest.approx((0.6, 0.4, 0.0), abs=1e-12)
    assert w.achieved_distance == pytest.approx(0.2, abs=1e-12)


def test_tv_witness_rational_exact_and_can_overshoot():
    p = Distribution([F(3, 5), F(2, 5), F(0)])
    w = tv_pre_witness(p, p, F(1, 5))
    assert w.distribution.entries == (F(1), F(0), F(0))
    # the dropped tail exceeds the requested budget and is reported as is
    assert w.achieved_distance == F(2, 5)
    assert w.achieved_distance > F(1, 5)


def test_tv_witness_majorises_target():
    p = Distribution([F(1, 2), F(3, 10), F(1, 5)])
    q = Distribution([F(1, 2), F(1, 2), F(0)])
    w = tv_pre_witness(p, q, F(1, 10))
    assert majorizes(w.distribution, q)


def test_tv_witness_rejects_impossible_budgets():
    p = Distribution([F(3, 4), F(1, 4)])
    with pytest.raises(ValueError):
        tv_pre_witness(p, p, F(1, 2))  # top entry exceeds 1 - epsilon
    with pytest.raises(ValueError):
        tv_pre_witness(p, p, F(1))  # epsilon must stay below 1
    with pytest.raises(ValueError):
        tv_pre_witness(p, p, F(-1, 2))


def test_tv_witness_rejects_unreachable_targets():
    p = Distribution([F(1, 3), F(1, 3), F(1, 3)])
    q = Distribution([F(1), F(0), F(0)])
    with pytest.raises(ValueError):
        tv_pre_witness(p, q, F(0))
