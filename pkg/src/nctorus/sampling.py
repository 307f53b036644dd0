"""Deterministic random fixtures for property tests and verify suites.

Randomness is counter-based: every consumer derives its generator from
(seed, label), so checks draw identical samples regardless of execution
order or parallelism.
"""

from __future__ import annotations

import zlib

import numpy as np

from .algebra import DeformationMatrix, WeylSeries
from .symbols import ScalarTerm, SymbolExpr, default_depth

Index = tuple[int, ...]


def rng_for(seed: int, label: str) -> np.random.Generator:
    key = (int(seed) & 0xFFFFFFFF) ^ zlib.crc32(label.encode("utf-8"))
    return np.random.Generator(np.random.Philox(key=key))


def random_index(rng: np.random.Generator, n: int, radius: int = 3) -> Index:
    return tuple(int(v) for v in rng.integers(-radius, radius + 1, size=n))


def random_weyl(
    rng: np.random.Generator,
    theta: DeformationMatrix,
    radius: int = 3,
    modes: int = 4,
) -> WeylSeries:
    """Random finite series with O(1) coefficients and mild decay in |k|."""
    n = theta.n
    coeffs: dict[Index, complex] = {}
    for _ in range(modes):
        k = random_index(rng, n, radius)
        z = complex(rng.standard_normal(), rng.standard_normal())
        coeffs[k] = coeffs.get(k, 0.0) + z / (1.0 + sum(abs(v) for v in k))
    return WeylSeries(theta, coeffs)


def random_scalar_terms(
    rng: np.random.Generator,
    n: int,
    order: complex,
    nterms: int = 3,
) -> list[ScalarTerm]:
    """Random closed-form terms of total order <= order, with the top hit."""
    out = []
    for i in range(nterms):
        alpha = tuple(int(v) for v in rng.integers(0, 3, size=n))
        drop = 0 if i == 0 else int(rng.integers(0, 3))
        mb = complex(order) - sum(alpha) - drop
        c = complex(rng.standard_normal(), rng.standard_normal()) / (1.0 + i)
        out.append(ScalarTerm(c, alpha, mb, 0.0, False))
    return out


def random_classical_symbol(
    rng: np.random.Generator,
    theta: DeformationMatrix,
    order: complex,
    weyl_radius: int = 1,
    modes: int = 3,
    depth: int | None = None,
) -> SymbolExpr:
    """Random classical symbol with a few Weyl modes of full declared order."""
    n = theta.n
    term_map: dict[Index, list[ScalarTerm]] = {
        (0,) * n: random_scalar_terms(rng, n, order)
    }
    for _ in range(modes - 1):
        l = random_index(rng, n, weyl_radius)
        if l in term_map:
            continue
        term_map[l] = random_scalar_terms(rng, n, order, nterms=2)
    if depth is None:
        depth = default_depth(order, n) + 2
    return SymbolExpr.build(theta, term_map, order=order, depth=depth)
