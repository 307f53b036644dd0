"""Exact and asymptotic star products and the symbol bracket."""

import math

import numpy as np

from nctorus import (
    BracketSymbol,
    DeformationMatrix,
    StarSymbol,
    WeylSeries,
    bar_delta,
    bracket_asympt,
    bracket_exact,
    bracket_homog,
    bracket_power,
    constant_symbol,
    monomial,
    op_apply,
    pointwise_mul,
    radial_power,
    star_asympt,
    star_exact,
)
from nctorus.sampling import random_classical_symbol, rng_for

TH = DeformationMatrix.two_torus(1.0 / math.sqrt(2.0))


def _mixed(order, seed, label, modes=3):
    return random_classical_symbol(rng_for(seed, label), TH, order=order,
                                   weyl_radius=2, modes=modes)


def test_star_mirrors_operator_composition():
    worst = 0.0
    for i in range(8):
        s = _mixed(-1.0, i, "starop-s")
        t = _mixed(0.0, i, "starop-t")
        for k in ((0, 0), (1, -2), (4, 3)):
            uk = WeylSeries.monomial(TH, k)
            composed = op_apply(s, op_apply(t, uk))
            via_star = star_exact(s, t, k) * uk
            worst = max(worst, (composed - via_star).norm() / (1.0 + composed.norm()))
    assert worst < 1e-12


def test_star_unit_absorption():
    one = constant_symbol(TH, WeylSeries.unit(TH))
    s = _mixed(-2.0, 3, "unit")
    for k in ((0, 0), (2, -1)):
        v = s.eval_lattice(k)
        assert (star_exact(s, one, k) - v).norm() < 1e-14
        assert (star_exact(one, s, k) - v).norm() < 1e-14


def test_bracket_of_coordinate_is_mode_derivation():
    # {sigma, k_j U_0} = -(mode-scaling derivation applied to sigma), exactly
    s = _mixed(-1.0, 4, "coord", modes=4)
    for j in (0, 1):
        e = tuple(1 if i == j else 0 for i in range(2))
        mono = monomial(TH, e)
        for k in ((1, 1), (-2, 3)):
            got = bracket_exact(s, mono, k)
            want = -1.0 * bar_delta(e, s).eval_lattice(k)
            assert (got - want).norm() < 1e-12 * (1.0 + want.norm())


def test_wrappers_agree_with_functions():
    s = _mixed(-1.0, 5, "wrap")
    t = _mixed(-2.0, 6, "wrap")
    star = StarSymbol(s, t)
    br = BracketSymbol(s, t)
    assert star.order == s.order + t.order
    k = (2, 2)
    assert (star.eval_lattice(k) - star_exact(s, t, k)).norm() == 0.0
    assert (br.eval_lattice(k) - bracket_exact(s, t, k)).norm() == 0.0
    assert abs(br.scalar_at(k) - bracket_exact(s, t, k).tau()) == 0.0


def test_zeroth_asymptotic_term_is_pointwise_product():
    s = _mixed(-1.0, 7, "j0-s")
    t = _mixed(-1.0, 8, "j0-t")
    appr = star_asympt(s, t, 0)
    for k in ((3, 1), (-4, 2)):
        want = s.eval_lattice(k) * t.eval_lattice(k)
        assert (appr.eval_lattice(k) - want).norm() < 1e-13 * (1.0 + want.norm())


def test_scalar_symbols_star_commute():
    # scalar-valued symbols compose pointwise in either order, for any theta
    s = bracket_power(TH, -1.0)
    t = radial_power(TH, -2.0)
    for k in ((2, 0), (5, -3)):
        assert (star_exact(s, t, k) - star_exact(t, s, k)).norm() == 0.0
        assert bracket_exact(s, t, k).norm() == 0.0
    assert bracket_asympt(s, t, 3).is_zero()


def test_asymptotic_remainder_decays():
    s = bracket_power(TH, -2.0, depth=6)
    u = WeylSeries.monomial(TH, (1, 0)) + 0.5 * WeylSeries.monomial(TH, (0, 1))
    t = pointwise_mul(constant_symbol(TH, u), bracket_power(TH, -2.0)).with_classical(-2.0, 6)
    ts = (4, 6, 9, 13, 19)
    J = 1
    appr = star_asympt(s, t, J)
    defects = [(star_exact(s, t, (m, m)) - appr.eval_lattice((m, m))).norm() for m in ts]
    xs = np.log([math.sqrt(2.0) * m for m in ts])
    slope = float(np.polyfit(xs, np.log(defects), 1)[0])
    assert slope <= -4.0 - J - 1 + 0.5


def test_bracket_layers_are_homogeneous():
    s = _mixed(-1.0, 9, "layers-s")
    t = _mixed(0.0, 10, "layers-t")
    layer = bracket_homog(s, t, degree=-2.0)
    v1 = layer.eval_real((3.0, 4.0))
    v2 = layer.eval_real((6.0, 8.0))
    scale = 2.0 ** -2.0
    assert (v2 - scale * v1).norm() < 1e-12 * (1.0 + v1.norm())
    assert layer.order == -2.0
