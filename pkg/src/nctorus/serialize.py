"""JSON round-trips for series, symbols, reports, and cached profiles.

The on-disk shapes are deliberately flat so fixtures can be written by hand:

  WeylSeries   {"kind": "weyl-series", "dim", "theta", "coeffs": [{"k", "re", "im"}]}
  SymbolExpr   {"kind": "symbol", "dim", "theta", "order", "depth", "terms": [
                  {"weyl": [...], "scalars": [{"c", "alpha", "bracket",
                   "radial", "excised"}]}], "patches": [...] (optional)}

Complex scalars serialise as {"re": x, "im": y}.  `canonical_json` fixes key
order and float formatting so identical inputs yield identical bytes.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .algebra import DeformationMatrix, WeylSeries
from .extension import BumpProfile
from .finitepart import FinitePartReport
from .symbols import PatchedSymbol, ScalarTerm, SymbolExpr


def _c(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _unc(d) -> complex:
    if isinstance(d, dict):
        return complex(float(d.get("re", 0.0)), float(d.get("im", 0.0)))
    return complex(d)


def _json_safe(obj: Any) -> Any:
    """Recursively coerce numpy scalars, complex, and tuples for json.dump."""
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return z.real if z.imag == 0.0 else _c(z)
    return obj


def canonical_json(obj: Any) -> str:
    return json.dumps(_json_safe(obj), sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Weyl series


def weyl_to_dict(a: WeylSeries) -> dict:
    coeffs = [
        {"k": list(k), "re": c.real, "im": c.imag}
        for k, c in sorted(a.coeffs.items())
    ]
    return {
        "kind": "weyl-series",
        "dim": a.dim,
        "theta": [list(r) for r in a.theta.rows],
        "coeffs": coeffs,
    }


def weyl_from_dict(d: dict, theta: DeformationMatrix | None = None) -> WeylSeries:
    if theta is None:
        theta = DeformationMatrix.from_array(d["theta"])
    coeffs = {
        tuple(int(x) for x in e["k"]): complex(e.get("re", 0.0), e.get("im", 0.0))
        for e in d.get("coeffs", [])
    }
    return WeylSeries(theta, coeffs)


# ---------------------------------------------------------------------------
# symbols


def _term_to_dict(t: ScalarTerm) -> dict:
    return {
        "c": _c(t.coeff),
        "alpha": list(t.alpha),
        "bracket": _c(t.bracket_exp),
        "radial": _c(t.radial_exp),
        "excised": bool(t.excised),
    }


def _term_from_dict(d: dict) -> ScalarTerm:
    return ScalarTerm(
        _unc(d.get("c", 1.0)),
        tuple(int(a) for a in d["alpha"]),
        _unc(d.get("bracket", 0.0)),
        _unc(d.get("radial", 0.0)),
        bool(d.get("excised", False)),
    )


def symbol_to_dict(sigma) -> dict:
    patches = None
    if isinstance(sigma, PatchedSymbol):
        patches = sigma.patches
        sigma = sigma.base
    if not isinstance(sigma, SymbolExpr):
        raise TypeError(f"cannot serialise symbol of type {type(sigma).__name__}")
    out = {
        "kind": "symbol",
        "dim": sigma.dim,
        "theta": [list(r) for r in sigma.theta.rows],
        "order": _c(sigma.order),
        "depth": sigma.classical.depth if sigma.classical is not None else None,
        "terms": [
            {"weyl": list(l), "scalars": [_term_to_dict(t) for t in ts]}
            for l, ts in sigma.terms
        ],
    }
    if patches is not None:
        out["patches"] = [
            {"k": list(k), "coeffs": weyl_to_dict(v)["coeffs"]}
            for k, v in sorted(patches.items())
        ]
    return out


def symbol_from_dict(d: dict):
    theta = DeformationMatrix.from_array(d["theta"])
    term_map = {
        tuple(int(x) for x in e["weyl"]): [_term_from_dict(s) for s in e["scalars"]]
        for e in d.get("terms", [])
    }
    order = _unc(d["order"]) if "order" in d else None
    depth = d.get("depth")
    base = SymbolExpr.build(theta, term_map, order=order, depth=depth)
    if "patches" in d:
        patches = {
            tuple(int(x) for x in e["k"]): weyl_from_dict({"coeffs": e["coeffs"]}, theta)
            for e in d["patches"]
        }
        return PatchedSymbol(base, patches)
    return base


def load_object(d: dict):
    kind = d.get("kind")
    if kind == "weyl-series":
        return weyl_from_dict(d)
    if kind == "symbol":
        return symbol_from_dict(d)
    raise ValueError(f"unknown object kind: {kind!r}")


def load_file(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return load_object(json.load(fh))


def save_file(obj: Any, path: str) -> None:
    if isinstance(obj, WeylSeries):
        obj = weyl_to_dict(obj)
    elif isinstance(obj, (SymbolExpr, PatchedSymbol)):
        obj = symbol_to_dict(obj)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(obj))
        fh.write("\n")


# ---------------------------------------------------------------------------
# reports


def report_to_dict(rep) -> dict:
    if isinstance(rep, FinitePartReport):
        return {
            "kind": "finite-part",
            "value": _c(rep.value),
            "power_coeffs": [
                {"exponent": _c(e), "coeff": _c(c)} for e, c in rep.power_coeffs
            ],
            "log_coeff": None if rep.log_coeff is None else _c(rep.log_coeff),
            "residual": float(rep.residual),
            "converged": bool(rep.converged),
            "mode": rep.mode,
            "meta": _json_safe(rep.meta),
        }
    # duck-typed: canonical-sum cross-check and similar aggregates
    if hasattr(rep, "cube") and hasattr(rep, "cross"):
        return {
            "kind": "canonical-sum",
            "value": _c(rep.value),
            "cube": report_to_dict(rep.cube),
            "cross": report_to_dict(rep.cross),
            "agreement": float(rep.agreement),
            "converged": bool(rep.converged),
            "meta": _json_safe(rep.meta),
        }
    raise TypeError(f"cannot serialise report of type {type(rep).__name__}")


# ---------------------------------------------------------------------------
# profile cache


def save_profile(profile: BumpProfile, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(profile.to_dict(), fh)


def load_profile(path: str) -> BumpProfile:
    with open(path, "r", encoding="utf-8") as fh:
        return BumpProfile.from_dict(json.load(fh))
