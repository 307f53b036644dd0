"""Pseudodifferential symbol calculus and regularized traces on noncommutative tori."""

from .algebra import (
    DeformationMatrix,
    WeylSeries,
    bracket,
    cocycle,
    delta,
    inner,
    sobolev_inner,
    tau,
    weyl_mul,
)
from .extension import (
    BumpProfile,
    ExtendedSymbol,
    extend,
    get_profile,
    make_profile,
    normalisation_check,
    restrict,
    smoothing_difference_slope,
)
from .finitepart import FinitePartReport, FitConfig, Polytope, fit_finite_part
from .quantise import (
    BracketSymbol,
    DequantisedSymbol,
    StarSymbol,
    TraceNonConvergence,
    bracket_asympt,
    bracket_exact,
    bracket_homog,
    dequantise,
    op_apply,
    op_trace,
    operator_matrix,
    star_asympt,
    star_exact,
)
from .symbols import (
    CallableSymbol,
    PatchedSymbol,
    ScalarTerm,
    SymbolExpr,
    TabulatedSymbol,
    bar_delta,
    bar_tau,
    bracket_power,
    constant_symbol,
    iota,
    monomial,
    pointwise_mul,
    radial_power,
)
from .traces import (
    CanonicalSumReport,
    canonical_sum_theta,
    canonical_trace,
    cutoff_integral,
    cutoff_sum,
    leading_trace,
    operator_residue,
    res_theta,
    sphere_integral,
    zeta_em,
)
from .verify import RunConfig, run_suite, suites

__all__ = [
    "DeformationMatrix",
    "WeylSeries",
    "bracket",
    "cocycle",
    "delta",
    "inner",
    "sobolev_inner",
    "tau",
    "weyl_mul",
    "BumpProfile",
    "ExtendedSymbol",
    "extend",
    "get_profile",
    "make_profile",
    "normalisation_check",
    "restrict",
    "smoothing_difference_slope",
    "FinitePartReport",
    "FitConfig",
    "Polytope",
    "fit_finite_part",
    "BracketSymbol",
    "DequantisedSymbol",
    "StarSymbol",
    "TraceNonConvergence",
    "bracket_asympt",
    "bracket_exact",
    "bracket_homog",
    "dequantise",
    "op_apply",
    "op_trace",
    "operator_matrix",
    "star_asympt",
    "star_exact",
    "CallableSymbol",
    "PatchedSymbol",
    "ScalarTerm",
    "SymbolExpr",
    "TabulatedSymbol",
    "bar_delta",
    "bar_tau",
    "bracket_power",
    "constant_symbol",
    "iota",
    "monomial",
    "pointwise_mul",
    "radial_power",
    "CanonicalSumReport",
    "canonical_sum_theta",
    "canonical_trace",
    "cutoff_integral",
    "cutoff_sum",
    "leading_trace",
    "operator_residue",
    "res_theta",
    "sphere_integral",
    "zeta_em",
    "RunConfig",
    "run_suite",
    "suites",
]

__version__ = "0.1.0"
