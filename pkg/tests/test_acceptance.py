"""Acceptance gate: the twelve behavioural criteria, one line each.

Run `pytest tests/test_acceptance.py -s` to see the lines as they print.
Each criterion carries its own tolerance; nothing here is loosened to pass.
"""

import math

import numpy as np

from nctorus import (
    BracketSymbol,
    DeformationMatrix,
    FitConfig,
    WeylSeries,
    bar_delta,
    bracket_exact,
    bracket_homog,
    bracket_power,
    canonical_sum_theta,
    canonical_trace,
    constant_symbol,
    cutoff_integral,
    cutoff_sum,
    dequantise,
    extend,
    get_profile,
    monomial,
    normalisation_check,
    op_apply,
    op_trace,
    pointwise_mul,
    radial_power,
    res_theta,
    sphere_integral,
    star_asympt,
    star_exact,
    zeta_em,
)
from nctorus.sampling import random_classical_symbol, random_weyl, rng_for
from nctorus.symbols import PatchedSymbol, translate

TH = DeformationMatrix.two_torus(1.0 / math.sqrt(2.0))
TH1 = DeformationMatrix.zero(1)
THETAS = (0.0, 1.0 / 3.0, 1.0 / math.sqrt(2.0))

# operator trace of <k>^-4 on the 2-torus, frozen from a theta-function
# integral representation, independent of the shell-sum path
TRACE_M4 = 3.2265813644233594


def _line(num, name, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    extra = f"  [{detail}]" if detail else ""
    print(f"[{num:02d}] {name}: {tag}{extra}")
    assert ok, f"criterion {num} ({name}) failed{extra}"


def _rel(x, y):
    return (x - y).norm() / (1.0 + max(x.norm(), y.norm()))


def test_01_algebra_exactness():
    worst = 0.0
    for i in range(200):
        th = DeformationMatrix.two_torus(THETAS[i % 3])
        rng = rng_for(i, "acc1")
        a = random_weyl(rng, th)
        b = random_weyl(rng, th)
        c = random_weyl(rng, th)
        worst = max(worst, _rel((a * b) * c, a * (b * c)))
        one = WeylSeries.unit(th)
        worst = max(worst, _rel(a * one, a), _rel(one * a, a))
        cyc = abs((a * b).tau() - (b * a).tau())
        worst = max(worst, cyc / (1.0 + a.norm() * b.norm()))
        e = (1, 0)
        worst = max(worst, _rel((a * b).delta(e), a.delta(e) * b + a * b.delta(e)))
    _line(1, "algebra exactness on 200 random draws", worst < 1e-12,
          f"worst defect {worst:.2e}")


def test_02_quantisation_bijection():
    worst = 0.0
    box = range(-5, 6)
    for i in range(20):
        rng = rng_for(i, "acc2")
        order = float(rng.uniform(-3.0, 1.0))
        s = random_classical_symbol(rng, TH, order=order, weyl_radius=2, modes=3)
        op = lambda x, s=s: op_apply(s, x)
        for k1 in box:
            for k2 in box:
                k = (k1, k2)
                worst = max(worst, _rel(dequantise(op, TH, k), s.eval_lattice(k)))
    _line(2, "quantisation roundtrip on the |k| <= 5 box", worst < 1e-12,
          f"worst defect {worst:.2e}")


def test_03_star_matches_composition():
    worst = 0.0
    for i in range(10):
        s = random_classical_symbol(rng_for(i, "acc3-s"), TH, order=-1.0,
                                    weyl_radius=2, modes=3)
        t = random_classical_symbol(rng_for(i, "acc3-t"), TH, order=0.0,
                                    weyl_radius=2, modes=3)
        for k in ((0, 0), (1, -2), (4, 3)):
            uk = WeylSeries.monomial(TH, k)
            composed = op_apply(s, op_apply(t, uk))
            worst = max(worst, _rel(composed, star_exact(s, t, k) * uk))
    bworst = 0.0
    s = random_classical_symbol(rng_for(40, "acc3-s"), TH, order=-1.0,
                                weyl_radius=2, modes=4)
    for j in (0, 1):
        e = tuple(1 if i == j else 0 for i in range(2))
        for k in ((1, 1), (-2, 3)):
            got = bracket_exact(s, monomial(TH, e), k)
            want = -1.0 * bar_delta(e, s).eval_lattice(k)
            bworst = max(bworst, (got - want).norm() / (1.0 + want.norm()))
    _line(3, "star product mirrors operator composition",
          worst < 1e-12 and bworst < 1e-12,
          f"composition {worst:.2e}, coordinate bracket {bworst:.2e}")


def test_04_asymptotic_remainder_decay():
    s = bracket_power(TH, -2.0, depth=8)
    w = WeylSeries.monomial(TH, (1, 0)) + 0.5 * WeylSeries.monomial(TH, (0, 1))
    t = pointwise_mul(constant_symbol(TH, w),
                      bracket_power(TH, -2.0)).with_classical(-2.0, 8)
    slopes = []
    ok = True
    for J in (0, 1, 2):
        appr = star_asympt(s, t, J)
        xs, ys = [], []
        for tt in (4, 6, 9, 13, 19, 28):
            k = (tt, tt)
            d = (star_exact(s, t, k) - appr.eval_lattice(k)).norm()
            xs.append(math.log(math.hypot(*k)))
            ys.append(math.log(d))
        slope = float(np.polyfit(xs, ys, 1)[0])
        slopes.append(slope)
        ok = ok and slope <= -4.0 - J - 1.0 + 0.5
    _line(4, "asymptotic star remainder decay", ok,
          ", ".join(f"J={J}: slope {sl:.2f}" for J, sl in zip((0, 1, 2), slopes)))


def test_05_extension_map():
    prof = get_profile("fast")
    rng = rng_for(11, "acc5")
    s = random_classical_symbol(rng, TH, order=-2.0, weyl_radius=1, modes=3)
    e = extend(s, profile=prof)
    iworst = 0.0
    for _ in range(50):
        k = tuple(int(x) for x in rng.integers(-6, 7, size=2))
        v = s.eval_lattice(k)
        w = e.eval_real(np.array(k, dtype=float))
        iworst = max(iworst, (v - w).norm() / (1.0 + v.norm()))
    ndef = normalisation_check(bracket_power(TH1, -4.0)).defect
    l = (2, -1)
    e_shift = extend(translate(l, s), profile=prof)
    tworst = 0.0
    for xi in ((0.3, 0.4), (-1.2, 2.6), (3.7, -0.9)):
        a = e_shift.eval_real(np.array(xi))
        b = e.eval_real(np.array(xi) + np.array(l, dtype=float))
        tworst = max(tworst, (a - b).norm() / (1.0 + b.norm()))
    _line(5, "extension interpolates, normalises, commutes with shifts",
          iworst < 1e-8 and ndef < 1e-6 and tworst < 1e-8,
          f"interp {iworst:.2e}, normalisation {ndef:.2e}, shift {tworst:.2e}")


def test_06_residue_constants():
    s = bracket_power(TH, -2.0)
    r = res_theta(s)
    quad = sphere_integral(s.homog_component(0), 2)
    below = res_theta(bracket_power(TH, -3.0))
    off_ladder = res_theta(bracket_power(TH, -2.5))
    img = bar_delta((1, 0), random_classical_symbol(
        rng_for(2, "acc6"), TH, order=-1.0, weyl_radius=2, modes=4))
    killed = res_theta(img)
    ok = (abs(r - 2 * math.pi) < 1e-9 and abs(quad - 2 * math.pi) < 1e-6
          and below == 0.0 and off_ladder == 0.0 and killed == 0.0)
    _line(6, "residue constants and exact vanishing", ok,
          f"analytic {abs(r - 2 * math.pi):.2e}, quadrature {abs(quad - 2 * math.pi):.2e}")


def test_07_residue_kills_brackets():
    worst = 0.0
    for i in range(20):
        rng = rng_for(i, "acc7")
        m1 = int(rng.integers(-1, 2))
        m2 = int(rng.integers(-1, 2))
        s = random_classical_symbol(rng, TH, order=float(m1), weyl_radius=1, modes=3)
        t = random_classical_symbol(rng, TH, order=float(m2), weyl_radius=1, modes=3)
        worst = max(worst, abs(res_theta(bracket_homog(s, t, degree=-2.0))))
    _line(7, "residue vanishes on star brackets (20 pairs)", worst < 1e-9,
          f"worst |res| {worst:.2e}")


def test_08_canonical_sum_zeta():
    def fixture(sv):
        return PatchedSymbol(radial_power(TH1, -sv), {(0,): WeylSeries.unit(TH1)})

    errs = []
    for sv in (0.5, 1.5):
        rep = canonical_sum_theta(fixture(sv))
        errs.append(abs(rep.value - (1.0 + 2.0 * zeta_em(sv))))
    rep = cutoff_sum(fixture(2.5), cfg=FitConfig(direct_tol=2e-7, direct_cap=400001))
    derr = abs(rep.value - (1.0 + 2.0 * zeta_em(2.5)))
    ok = errs[0] < 1e-4 and errs[1] < 1e-4 and rep.mode == "direct" and derr < 1e-6
    _line(8, "canonical sum reproduces zeta values", ok,
          f"s=1/2 {errs[0]:.2e}, s=3/2 {errs[1]:.2e}, s=5/2 direct {derr:.2e}")


def test_09_canonical_sum_trace_and_invariances():
    tol = FitConfig().value_tol
    s = random_classical_symbol(rng_for(1, "acc9"), TH, order=-0.7,
                                weyl_radius=1, modes=3)
    # anchor a mode opposite one of s's so the scalar part of the bracket is
    # genuinely nonzero pointwise (unpaired mode sets trivialise the check)
    t = (random_classical_symbol(rng_for(2, "acc9"), TH, order=-0.55,
                                 weyl_radius=1, modes=3)
         + bracket_power(TH, -0.55, weyl=(1, 0)))
    br = BracketSymbol(s, t)
    assert abs(br.scalar_at((3, 2))) > 1e-12
    # order -2.25 sits just below -n where the direct probe cannot meet its
    # tolerance inside any sane point budget; cap the probe, the ladder fit
    # carries the value either way
    rep = canonical_sum_theta(br, order=-2.25, cfg=FitConfig(direct_cap=4000))
    bdef = abs(rep.value)

    sym = random_classical_symbol(rng_for(3, "acc9"), TH, order=-1.3,
                                  weyl_radius=1, modes=3)
    repp = canonical_sum_theta(sym)
    wval = canonical_sum_theta(sym, cfg=FitConfig(n_min=30, n_max=80)).value
    wdef = abs(repp.value - wval)

    rng = rng_for(4, "acc9")
    base = random_classical_symbol(rng, TH, order=-4.0, weyl_radius=1, modes=3)
    sig = base + bracket_power(TH, -4.0)
    l = tuple(int(x) for x in rng.integers(-3, 4, size=2))
    if l == (0, 0):
        l = (2, -1)
    tdef = abs(canonical_sum_theta(sig).value
               - canonical_sum_theta(translate(l, sig), order=-4.0).value)

    ok = (bdef < 5 * tol and repp.agreement < 2 * tol
          and wdef < 2 * tol and tdef < 2 * tol)
    _line(9, "canonical sum: bracket, polytope, window, translation", ok,
          f"bracket {bdef:.2e}, polytope {repp.agreement:.2e}, "
          f"window {wdef:.2e}, shift {tdef:.2e}")


def test_10_canonical_trace_meets_operator_trace():
    s = bracket_power(TH, -4.0)
    ct = canonical_trace(s)
    ot = op_trace(s, rtol=1e-10)
    agree = abs(ct - ot)
    anchor = abs(ot - TRACE_M4)
    _line(10, "canonical trace equals the operator trace",
          agree < 1e-4 and anchor < 1e-8 * TRACE_M4,
          f"|csum - trace| {agree:.2e}, oracle defect {anchor:.2e}")


def test_11_cutoff_integral_fixtures():
    rep1 = cutoff_integral(bracket_power(TH1, -2.0))
    e1 = abs(rep1.value - math.pi)
    rep0 = cutoff_integral(constant_symbol(TH1, WeylSeries.unit(TH1)))
    e0 = max(abs(rep0.value), abs(rep0.power_coeff(1.0) - 2.0))
    rep2 = cutoff_integral(bracket_power(TH, -2.0))
    e2 = max(abs(rep2.value), abs(rep2.log_coeff - 2 * math.pi))
    _line(11, "cut-off integral fixtures", e1 < 1e-8 and e0 < 1e-10 and e2 < 1e-8,
          f"pi {e1:.2e}, constant {e0:.2e}, log layer {e2:.2e}")


def test_12_commutative_reduction():
    bracket_exact_zero = True
    vals_res, vals_sum = [], []
    for t0 in THETAS:
        th = DeformationMatrix.two_torus(t0)
        s = random_classical_symbol(rng_for(7, "acc12-s"), th, order=-2.0,
                                    weyl_radius=1, modes=1)
        t = random_classical_symbol(rng_for(8, "acc12-t"), th, order=-0.7,
                                    weyl_radius=1, modes=1)
        for k in ((0, 0), (2, -1), (-3, 4)):
            bracket_exact_zero = bracket_exact_zero and bracket_exact(s, t, k).norm() == 0.0
        vals_res.append(res_theta(s))
        vals_sum.append(canonical_sum_theta(t).value)
    same = (vals_res[0] == vals_res[1] == vals_res[2]
            and vals_sum[0] == vals_sum[1] == vals_sum[2])
    _line(12, "commutative reduction: scalar sector ignores theta",
          bracket_exact_zero and same,
          f"res {vals_res[0]:.6f}, csum {vals_sum[0]:.6f}")
