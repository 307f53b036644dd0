"""Exact identities of the deformed Weyl algebra."""

import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nctorus import DeformationMatrix, WeylSeries, cocycle
from nctorus.algebra import (
    bracket,
    int_pow,
    iter_multiindices,
    mi_binomial,
    mi_factorial,
    peetre_bound,
)
from nctorus.sampling import random_weyl, rng_for

THETAS = [0.0, 1.0 / 3.0, 1.0 / math.sqrt(2.0)]

index2 = st.tuples(st.integers(-4, 4), st.integers(-4, 4))


def rel(x, y):
    return (x - y).norm() / (1.0 + max(x.norm(), y.norm()))


def series(t0, seed, label):
    th = DeformationMatrix.two_torus(t0)
    return random_weyl(rng_for(seed, label), th, radius=3, modes=4)


@given(index2, index2, index2, st.sampled_from(THETAS))
@settings(max_examples=120, deadline=None)
def test_cocycle_is_a_bicharacter(k, l, m, t0):
    th = DeformationMatrix.two_torus(t0)
    kl = tuple(a + b for a, b in zip(k, l))
    lm = tuple(a + b for a, b in zip(l, m))
    assert abs(abs(cocycle(th, k, l)) - 1.0) < 1e-15
    assert abs(cocycle(th, k, l) * cocycle(th, kl, m)
               - cocycle(th, l, m) * cocycle(th, k, lm)) < 1e-12
    assert cocycle(th, k, (0, 0)) == 1.0
    assert cocycle(th, (0, 0), l) == 1.0


@given(index2, index2, st.sampled_from(THETAS))
@settings(max_examples=80, deadline=None)
def test_commutation_phase(k, l, t0):
    # U_k U_l = e^{-2 pi i <k, theta l>} U_l U_k
    th = DeformationMatrix.two_torus(t0)
    a = WeylSeries.monomial(th, k)
    b = WeylSeries.monomial(th, l)
    phase = cmath.exp(-2j * math.pi * th.pairing(k, l))
    assert rel(a * b, phase * (b * a)) < 1e-14


@pytest.mark.parametrize("t0", THETAS)
def test_associativity(t0):
    worst = 0.0
    for i in range(40):
        a = series(t0, i, "assoc-a")
        b = series(t0, i, "assoc-b")
        c = series(t0, i, "assoc-c")
        worst = max(worst, rel((a * b) * c, a * (b * c)))
    assert worst < 1e-12


@pytest.mark.parametrize("t0", THETAS)
def test_unit_and_monomial_relations(t0):
    th = DeformationMatrix.two_torus(t0)
    one = WeylSeries.unit(th)
    for i in range(10):
        a = series(t0, i, "unit")
        assert rel(a * one, a) == 0.0
        assert rel(one * a, a) == 0.0
    u = WeylSeries.monomial(th, (2, -1))
    # generators are unitary with U_k* = U_{-k}
    assert rel(u * u.adjoint(), one) < 1e-15
    assert u.adjoint().support() == {(-2, 1)}


@pytest.mark.parametrize("t0", THETAS)
def test_adjoint_is_an_involution(t0):
    for i in range(10):
        a = series(t0, i, "inv-a")
        b = series(t0, i, "inv-b")
        assert rel(a.adjoint().adjoint(), a) == 0.0
        assert rel((a * b).adjoint(), b.adjoint() * a.adjoint()) < 1e-13


@pytest.mark.parametrize("t0", THETAS)
def test_trace_is_cyclic_positive_faithful(t0):
    for i in range(20):
        a = series(t0, i, "tr-a")
        b = series(t0, i, "tr-b")
        ab, ba = a * b, b * a
        assert abs(ab.tau() - ba.tau()) < 1e-12 * (1.0 + abs(ab.tau()))
        gram = (a * a.adjoint()).tau()
        l2 = sum(abs(c) ** 2 for c in a.coeffs.values())
        assert abs(gram - l2) < 1e-13 * (1.0 + l2)
        assert abs(gram.imag) < 1e-13 * (1.0 + l2)
    z = WeylSeries.zero(DeformationMatrix.two_torus(t0))
    assert (z * z.adjoint()).tau() == 0.0


@pytest.mark.parametrize("t0", THETAS)
def test_derivations_are_leibniz_and_star_compatible(t0):
    for i in range(20):
        a = series(t0, i, "der-a")
        b = series(t0, i, "der-b")
        for alpha in ((1, 0), (0, 1)):
            lhs = (a * b).delta(alpha)
            rhs = a.delta(alpha) * b + a * b.delta(alpha)
            assert rel(lhs, rhs) < 1e-12
            assert rel(a.adjoint().delta(alpha), -(a.delta(alpha).adjoint())) < 1e-15


def test_norm_inner_seminorms():
    a = series(THETAS[2], 7, "norm")
    assert abs(a.inner(a) - a.norm() ** 2) < 1e-13 * (1.0 + a.norm() ** 2)
    # the weight <k>^N grows with N, so the seminorm ladder is monotone
    assert a.seminorm_q(0) <= a.seminorm_q(2) <= a.seminorm_q(4)
    assert a.truncate(1e9).is_zero()
    assert not a.truncate(1e-12).is_zero()


@given(
    st.floats(-3, 3),
    st.tuples(st.floats(-5, 5), st.floats(-5, 5)),
    st.tuples(st.floats(-5, 5), st.floats(-5, 5)),
)
@settings(max_examples=100, deadline=None)
def test_peetre_bound_dominates(t, x, y):
    xy = tuple(a + b for a, b in zip(x, y))
    assert bracket(xy) ** t <= peetre_bound(t, x, y) * (1.0 + 1e-12)


def test_multiindex_helpers():
    assert mi_factorial((3, 2)) == 12
    assert mi_binomial((3, 2), (1, 1)) == 6
    assert int_pow((2, 3), (2, 1)) == 12
    assert int_pow((2, 3), (0, 0)) == 1
    alphas = list(iter_multiindices(2, 3))
    assert len(alphas) == 10
    assert len(set(alphas)) == 10
    assert all(sum(a) <= 3 for a in alphas)


def test_mixed_deformations_are_rejected():
    a = series(0.0, 0, "mix")
    b = series(1.0 / 3.0, 0, "mix")
    with pytest.raises(ValueError):
        a * b
    with pytest.raises(ValueError):
        a + b
