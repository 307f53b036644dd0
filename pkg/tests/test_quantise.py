"""Quantisation: operator action, matrix view, operator trace."""

import math

import pytest

from nctorus import (
    DeformationMatrix,
    DequantisedSymbol,
    TraceNonConvergence,
    WeylSeries,
    bracket_power,
    dequantise,
    op_apply,
    op_trace,
    operator_matrix,
)
from nctorus.sampling import random_classical_symbol, random_weyl, rng_for

TH = DeformationMatrix.two_torus(1.0 / math.sqrt(2.0))

# sum over Z^2 of (1 + |k|^2)^(-2); frozen from a theta-function integral
# representation, independent of the shell-sum path exercised here
TRACE_M4 = 3.2265813644233594


def test_operator_acts_diagonally_on_generators():
    rng = rng_for(0, "opapply")
    s = random_classical_symbol(rng, TH, order=-1.0, weyl_radius=2, modes=3)
    for k in ((0, 0), (2, 1), (-3, 4)):
        got = op_apply(s, WeylSeries.monomial(TH, k))
        want = s.eval_lattice(k) * WeylSeries.monomial(TH, k)
        assert (got - want).norm() < 1e-14 * (1.0 + want.norm())


def test_operator_is_linear():
    rng = rng_for(1, "oplin")
    s = random_classical_symbol(rng, TH, order=-1.0, weyl_radius=2, modes=3)
    a = random_weyl(rng, TH)
    b = random_weyl(rng, TH)
    lhs = op_apply(s, a + (0.5 - 2.0j) * b)
    rhs = op_apply(s, a) + (0.5 - 2.0j) * op_apply(s, b)
    assert (lhs - rhs).norm() < 1e-13 * (1.0 + rhs.norm())


def test_dequantise_inverts_quantisation():
    worst = 0.0
    for i in range(6):
        rng = rng_for(i, "roundtrip")
        order = float(rng.integers(-3, 2))
        s = random_classical_symbol(rng, TH, order=order, weyl_radius=2, modes=3)
        back = DequantisedSymbol(lambda a, s=s: op_apply(s, a), TH, order=s.order)
        for k1 in range(-3, 4):
            for k2 in range(-3, 4):
                v = s.eval_lattice((k1, k2))
                w = back.eval_lattice((k1, k2))
                worst = max(worst, (v - w).norm() / (1.0 + v.norm()))
    assert worst < 1e-12


def test_dequantise_reads_any_operator():
    # not just quantised ones: left multiplication by a has the constant symbol a
    a = random_weyl(rng_for(2, "anyop"), TH)
    for k in ((0, 0), (3, -1), (-2, 2)):
        sym = dequantise(lambda x: a * x, TH, k)
        assert (sym - a).norm() < 1e-14 * (1.0 + a.norm())


def test_matrix_view_matches_operator():
    rng = rng_for(2, "matrix")
    s = random_classical_symbol(rng, TH, order=0.0, weyl_radius=1, modes=3)
    M, basis, spill = operator_matrix(s, 2)
    assert len(basis) == 25 and M.shape == (25, 25)
    col = {k: i for i, k in enumerate(basis)}
    recorded = 0.0
    for j, k in enumerate(basis):
        out = op_apply(s, WeylSeries.monomial(TH, k))
        for mode, c in out.coeffs.items():
            if mode in col:
                assert abs(M[col[mode], j] - c) < 1e-13
            else:
                recorded += abs(c)
    assert abs(spill.total_mass - recorded) < 1e-12
    assert spill.count == len(spill.entries)


def test_matrix_of_scalar_symbol_is_diagonal():
    M, basis, spill = operator_matrix(bracket_power(TH, -2.0), 2)
    for i in range(len(basis)):
        for j in range(len(basis)):
            if i != j:
                assert M[i, j] == 0.0
    assert spill.count == 0


def test_operator_trace_matches_reference_value():
    v = op_trace(bracket_power(TH, -4.0), rtol=1e-10)
    assert abs(v - TRACE_M4) < 1e-9 * TRACE_M4
    assert abs(v.imag) < 1e-12


def test_operator_trace_guards():
    with pytest.raises(ValueError):
        op_trace(bracket_power(TH, -1.5))  # declared order is not trace class
    with pytest.raises(TraceNonConvergence):
        op_trace(bracket_power(TH, -2.5), rtol=1e-12, k_cap=10)
