"""JSON schemas, canonical encoding, file round-trips."""

import json
import math

import numpy as np

from nctorus import DeformationMatrix, FitConfig, WeylSeries, bracket_power, get_profile, radial_power
from nctorus import serialize
from nctorus.sampling import random_classical_symbol, random_weyl, rng_for
from nctorus.symbols import PatchedSymbol
from nctorus.traces import canonical_sum_theta, cutoff_sum

TH = DeformationMatrix.two_torus(1.0 / math.sqrt(2.0))
TH1 = DeformationMatrix.zero(1)


def test_weyl_roundtrip():
    a = random_weyl(rng_for(0, "ser"), TH)
    d = serialize.weyl_to_dict(a)
    assert d["kind"] == "weyl-series"
    b = serialize.weyl_from_dict(json.loads(json.dumps(d)))
    assert (a - b).norm() == 0.0
    assert b.theta == a.theta


def test_symbol_roundtrip_preserves_values_and_meta():
    s = random_classical_symbol(rng_for(1, "ser"), TH, order=-1.5,
                                weyl_radius=2, modes=3)
    d = serialize.symbol_to_dict(s)
    t = serialize.symbol_from_dict(json.loads(json.dumps(d)))
    assert t.order == s.order
    assert t.classical.depth == s.classical.depth
    for k in ((0, 0), (3, -1), (-4, 4)):
        assert (t.eval_lattice(k) - s.eval_lattice(k)).norm() < 1e-15


def test_patched_symbol_roundtrip():
    s = PatchedSymbol(radial_power(TH1, -1.5), {(0,): WeylSeries.unit(TH1)})
    d = serialize.symbol_to_dict(s)
    assert "patches" in d
    t = serialize.symbol_from_dict(json.loads(json.dumps(d)))
    assert t.scalar_at((0,)) == 1.0
    assert t.scalar_at((2,)) == s.scalar_at((2,))


def test_canonical_json_is_order_independent():
    a = {"b": 1, "a": [1.5, {"y": 2, "x": complex(1, -2)}]}
    b = {"a": [1.5, {"x": complex(1, -2), "y": 2}], "b": 1}
    assert serialize.canonical_json(a) == serialize.canonical_json(b)
    # numpy scalars flatten to plain JSON numbers
    assert serialize.canonical_json({"v": np.float64(0.5)}) == '{"v":0.5}'
    assert serialize.canonical_json({"v": np.int64(3)}) == '{"v":3}'


def test_serialization_is_deterministic():
    s1 = random_classical_symbol(rng_for(9, "det"), TH, order=-2.0)
    s2 = random_classical_symbol(rng_for(9, "det"), TH, order=-2.0)
    assert (serialize.canonical_json(serialize.symbol_to_dict(s1))
            == serialize.canonical_json(serialize.symbol_to_dict(s2)))


def test_finite_part_reports_serialize():
    rep = cutoff_sum(radial_power(TH1, -1.0),
                     cfg=FitConfig(include_log=True, drop_below=-5.0))
    d = serialize.report_to_dict(rep)
    assert d["kind"] == "finite-part"
    assert d["log_coeff"] is not None
    json.dumps(d)  # fully JSON-safe
    rep2 = cutoff_sum(radial_power(TH1, -2.5), cfg=FitConfig(direct_tol=1e-4))
    d2 = serialize.report_to_dict(rep2)
    assert d2["log_coeff"] is None
    assert d2["mode"] == "direct"


def test_canonical_sum_reports_serialize():
    sym = PatchedSymbol(radial_power(TH1, -0.5), {(0,): WeylSeries.unit(TH1)})
    rep = canonical_sum_theta(sym, order=-0.5)
    d = serialize.report_to_dict(rep)
    assert d["kind"] == "canonical-sum"
    assert d["cube"]["kind"] == "finite-part"
    assert d["agreement"] >= 0.0
    json.dumps(d)


def test_file_io(tmp_path):
    s = bracket_power(TH, -2.0)
    p = tmp_path / "sym.json"
    serialize.save_file(serialize.symbol_to_dict(s), str(p))
    t = serialize.load_file(str(p))
    assert t.scalar_at((1, 2)) == s.scalar_at((1, 2))
    a = random_weyl(rng_for(4, "io"), TH)
    pw = tmp_path / "weyl.json"
    serialize.save_file(serialize.weyl_to_dict(a), str(pw))
    b = serialize.load_file(str(pw))
    assert (a - b).norm() == 0.0


def test_profile_io(tmp_path):
    prof = get_profile("fast")
    p = tmp_path / "prof.json"
    serialize.save_profile(prof, str(p))
    clone = serialize.load_profile(str(p))
    xs = np.linspace(-2.0, 2.0, 17)
    assert np.allclose(clone.hat(xs), prof.hat(xs), atol=1e-12)
