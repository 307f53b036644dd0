"""Deterministic verification harness and its mutation self-test."""

import pytest

from nctorus import RunConfig, run_suite, suites
from nctorus.serialize import canonical_json
from nctorus.verify import ConfigError, mutated_cocycle_sign


def test_registry_names_the_suites():
    names = suites()
    for expected in ("algebra", "symbols", "quantise", "star", "extension", "traces"):
        assert expected in names


def test_full_run_is_green_and_deterministic():
    a = run_suite("all")
    b = run_suite("all")
    assert a["counts"]["fail"] == 0
    assert a["counts"]["flagged"] == 0
    assert a["counts"]["pass"] == len(a["checks"])
    # identical (config, seed) must give byte-identical reports
    assert canonical_json(a) == canonical_json(b)


def test_seed_changes_inputs_not_outcomes():
    rep = run_suite("algebra", seed=123)
    assert rep["seed"] == 123
    assert rep["config"]["seed"] == 123
    assert rep["counts"]["fail"] == 0


def test_mutation_is_detected_and_reverted():
    bad = run_suite("algebra", mutate="cocycle-sign")
    assert bad["counts"]["fail"] >= 1
    failed = {c["id"] for c in bad["checks"] if c["status"] == "fail"}
    assert "algebra.weyl-commutation" in failed
    # the patch must not leak out of the context
    clean = run_suite("algebra")
    assert clean["counts"]["fail"] == 0


def test_mutation_context_restores_on_error():
    import nctorus.algebra as algebra
    original = algebra.cocycle
    with pytest.raises(RuntimeError):
        with mutated_cocycle_sign():
            raise RuntimeError("boom")
    assert algebra.cocycle is original


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"bogus": 1})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"dimension": 7})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"fit_window": [60, 20]})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"profile_quality": "sloppy"})
    cfg = RunConfig.from_dict({"seed": 4, "tol_scale": 10.0})
    assert cfg.to_dict()["seed"] == 4
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


def test_unknown_suite_and_mutation_rejected():
    with pytest.raises(KeyError):
        run_suite("nonsense")
    with pytest.raises(KeyError):
        run_suite("algebra", mutate="bogus")


def test_check_results_carry_the_tolerance():
    rep = run_suite("algebra")
    for c in rep["checks"]:
        assert set(c) >= {"id", "status", "defect", "tol"}
        if c["status"] == "pass" and c["tol"] > 0:
            assert c["defect"] <= c["tol"]
