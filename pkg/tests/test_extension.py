"""Band-limited extension of lattice symbols to the continuum."""

import math

import numpy as np
import pytest

from nctorus import (
    DeformationMatrix,
    WeylSeries,
    bracket_power,
    extend,
    get_profile,
    normalisation_check,
    restrict,
    smoothing_difference_slope,
)
from nctorus.extension import BumpProfile
from nctorus.sampling import random_classical_symbol, rng_for
from nctorus.symbols import translate

TH = DeformationMatrix.two_torus(1.0 / math.sqrt(2.0))
TH1 = DeformationMatrix.zero(1)


@pytest.fixture(scope="module")
def prof():
    return get_profile("fast")


def test_profile_partitions_unity(prof):
    assert prof.partition_defect < 1e-12
    assert prof.interp_defect < 1e-8
    # the kernel transform interpolates the Kronecker delta on the integers
    assert abs(prof.hat_nd(np.array([0.0])) - 1.0) < 1e-9
    for j in (1.0, 2.0, 5.0):
        assert abs(prof.hat_nd(np.array([j]))) < 1e-9
    assert get_profile("fast") is prof


def test_profile_roundtrips_through_dict(prof):
    clone = BumpProfile.from_dict(prof.to_dict())
    xs = np.linspace(-3.0, 3.0, 31)
    assert np.allclose(clone.hat(xs), prof.hat(xs), atol=1e-12)


def test_extension_interpolates_lattice_values(prof):
    rng = rng_for(11, "interp")
    s = random_classical_symbol(rng, TH, order=-2.0, weyl_radius=1, modes=3)
    e = extend(s, profile=prof)
    worst = 0.0
    for _ in range(50):
        k = tuple(int(x) for x in rng.integers(-6, 7, size=2))
        v = s.eval_lattice(k)
        w = e.eval_real(np.array(k, dtype=float))
        worst = max(worst, (v - w).norm() / (1.0 + v.norm()))
    assert worst < 1e-8


def test_extension_is_linear(prof):
    s = bracket_power(TH, -2.0)
    t = bracket_power(TH, -3.0)
    combo = extend(2.0 * s + t, profile=prof)
    es = extend(s, profile=prof)
    et = extend(t, profile=prof)
    for xi in ((0.3, 0.7), (-1.6, 2.2)):
        a = combo.eval_real(np.array(xi))
        b = 2.0 * es.eval_real(np.array(xi)) + et.eval_real(np.array(xi))
        assert (a - b).norm() < 1e-13 * (1.0 + b.norm())


def test_extension_commutes_with_lattice_translation(prof):
    s = random_classical_symbol(rng_for(12, "trans"), TH, order=-2.0)
    l = (2, -1)
    e_shift = extend(translate(l, s), profile=prof)
    e_plain = extend(s, profile=prof)
    for xi in ((0.3, 0.4), (-1.2, 2.6), (3.7, -0.9)):
        a = e_shift.eval_real(np.array(xi))
        b = e_plain.eval_real(np.array(xi) + np.array(l, dtype=float))
        assert (a - b).norm() < 1e-8 * (1.0 + b.norm())


def test_restriction_recovers_lattice_symbol(prof):
    s = random_classical_symbol(rng_for(13, "restr"), TH, order=-2.0)
    r = restrict(extend(s, profile=prof))
    for k in ((0, 0), (3, -2), (-5, 1)):
        assert (r.eval_lattice(k) - s.eval_lattice(k)).norm() < 1e-8


def test_normalisation_intertwines_sum_and_integral():
    rep = normalisation_check(bracket_power(TH1, -4.0))
    assert rep.defect < 1e-6


def test_extension_differences_smooth_rapidly():
    pts = [np.array([m + 0.5, m + 0.5]) for m in range(1, 7)]
    rep = smoothing_difference_slope(bracket_power(TH, -4.0), pts, radius=16.0, exact=True)
    assert rep.slope <= -6.0


def test_truncation_estimate_is_a_bound(prof):
    s = bracket_power(TH, -2.0)
    wide = extend(s, profile=prof, radius=18.0)
    narrow = extend(s, profile=prof, radius=8.0)
    xi = np.array([0.4, 0.6])
    gap = (wide.eval_real(xi) - narrow.eval_real(xi)).norm()
    # the reported estimate dominates the radius-truncation error it models
    assert gap <= narrow.truncation_estimate(xi) + wide.truncation_estimate(xi) + 1e-12
