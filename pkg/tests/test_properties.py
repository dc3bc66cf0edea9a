"""Structural invariants checked on seeded random spaces."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metrikos.axioms import all_pairs_min_chain, check_b, check_theta_metric, min_b_constant, theta_fold
from metrikos.core import DistanceSpace, SampledSequence
from metrikos.expr import theta_preset
from metrikos.generators import generate
from metrikos.metrize import WeightTransform, chain_metric
from metrikos.regularity import check_iiiB, cross_check_conditions, locally_regular_phi, uniform_phi

seeds = st.integers(0, 2**31 - 1)
families = st.sampled_from(["euclidean_squared", "random_matrix", "euclidean"])


def make(family, seed, n):
    return generate(family, np.random.default_rng(seed), n)


@settings(max_examples=50, deadline=None)
@given(families, seeds, st.integers(2, 8), st.floats(0.01, 100))
def test_b_constant_scale_free_and_sharp(family, seed, n, lam):
    space = make(family, seed, n)
    k = min_b_constant(space)
    assert k >= 1.0
    assert min_b_constant(space.scaled(lam)) == pytest.approx(k, rel=1e-12)
    assert check_b(space, k).passed
    assert not check_b(space, k * (1 - 1e-6)).passed


def test_k_below_one_fails_with_y_equal_x():
    space = make("euclidean", 0, 3)
    v = check_b(space, 0.9)
    assert not v.passed and v.witness.points[1] in (v.witness.points[0], v.witness.points[2])


@settings(max_examples=40, deadline=None)
@given(families, seeds, st.integers(2, 8))
def test_sum_theta_is_triangle(family, seed, n):
    space = make(family, seed, n)
    assert check_theta_metric(space, theta_preset("sum")).passed == check_b(space, 1.0).passed
    vals = list(space.d[0])
    assert theta_fold(theta_preset("sum"), vals) == pytest.approx(sum(vals))


@settings(max_examples=40, deadline=None)
@given(families, seeds, st.integers(2, 8))
def test_chain_sums_form_a_metric_below_d(family, seed, n):
    space = make(family, seed, n)
    sp = all_pairs_min_chain(space).sp
    assert np.all(sp <= space.d) and np.array_equal(sp, sp.T) and np.all(np.diag(sp) == 0)
    assert np.all(sp[:, None, :] <= sp[:, :, None] + sp[None, :, :] + 1e-12)


@settings(max_examples=40, deadline=None)
@given(families, seeds, st.integers(2, 8), st.floats(0.2, 0.9))
def test_chain_metric_idempotent_and_monotone(family, seed, n, eps):
    space = make(family, seed, n)
    res = chain_metric(space)
    again = chain_metric(res.as_space())
    np.testing.assert_allclose(again.metric, res.metric, rtol=1e-12)
    # t^eps <= t^(eps/2) whenever t <= 1, so scale distances into (0, 1]
    small = space.scaled(1.0 / space.d.max())
    lo = chain_metric(small, WeightTransform.power(eps)).metric
    hi = chain_metric(small, WeightTransform.power(eps / 2)).metric
    assert np.all(lo <= hi * (1 + 1e-12))


@settings(max_examples=30, deadline=None)
@given(families, seeds, st.integers(2, 7))
def test_phi_monotone_in_eps_and_uniform_below_local(family, seed, n):
    space = make(family, seed, n)
    for a in space.labels:
        prev = 0.0
        for eps in (0.1, 0.3, 1.0, 3.0):
            cert = locally_regular_phi(space, a, eps)
            assert cert.value >= prev
            prev = cert.value
            assert uniform_phi(space, eps).value <= cert.value


def test_cross_check_vacuous_single_point():
    assert cross_check_conditions(DistanceSpace(["a"], [[0]]), [0.5, 1]).passed


def test_iiiB_trace_examples():
    n = np.arange(1, 200)
    s = lambda name, v: SampledSequence(name, v)  # noqa: E731
    assert check_iiiB(s("a", 1 / n), s("b", 1 / n**2), s("c", 2 / n), 0.1).passed
    v = check_iiiB(s("a", 1 / n), s("b", 1 / n), s("c", np.ones_like(n)), 0.1)
    assert not v.passed and v.witness.points == (11,)
    z = np.zeros(5)
    assert check_iiiB(s("a", z), s("b", z), s("c", z), 0.1).passed
