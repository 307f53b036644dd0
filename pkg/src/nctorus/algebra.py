"""Deformed Weyl algebra on the rank-n lattice, in exact finite-series form.

Elements are finitely supported series  a = sum_k a_k U_k  with k in Z^n and
unitary generators obeying

    U_k U_l = c(k, l) U_{k+l},      c(k, l) = exp(-pi i <k, theta l>),

for an antisymmetric real matrix theta.  Everything here is exact arithmetic
on coefficient dictionaries; no truncation happens unless asked for.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

import numpy as np

# Canonical form drops exact zeros and denormal-range dust only.  Any
# user-visible truncation must go through WeylSeries.truncate.
PRUNE_FLOOR = 1e-300

Index = tuple[int, ...]


def bracket(x) -> float:
    """Japanese bracket <x> = sqrt(|x|^2 + 1) of a scalar or vector."""
    if np.isscalar(x):
        return math.sqrt(float(x) * float(x) + 1.0)
    v = np.asarray(x, dtype=float)
    return math.sqrt(float(v @ v) + 1.0)


def peetre_bound(t: float, x, y) -> float:
    """Right hand side (sqrt 2)^|t| <x>^t <y>^|t| of Peetre's inequality for <x+y>^t."""
    return math.sqrt(2.0) ** abs(t) * bracket(x) ** t * bracket(y) ** abs(t)


# ---------------------------------------------------------------------------
# multi-indices


def mi_abs(alpha: Index) -> int:
    return sum(alpha)


def mi_factorial(alpha: Index) -> int:
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


def mi_binomial(alpha: Index, beta: Index) -> int:
    """Product of componentwise binomial coefficients; 0 unless beta <= alpha."""
    out = 1
    for a, b in zip(alpha, beta):
        out *= math.comb(a, b)
    return out


def mi_leq(beta: Index, alpha: Index) -> bool:
    return all(b <= a for a, b in zip(alpha, beta))

def mi_add(alpha: Index, beta: Index) -> Index:
    return tuple(a + b for a, b in zip(alpha, beta))


def mi_sub(alpha: Index, beta: Index) -> Index:
    return tuple(a - b for a, b in zip(alpha, beta))


def iter_multiindices(n: int, max_total: int) -> Iterator[Index]:
    """All alpha in N^n with |alpha| <= max_total, graded lexicographic."""
    def rec(prefix: Index, remaining: int, slots: int) -> Iterator[Index]:
        if slots == 0:
            yield prefix
            return
        for a in range(remaining + 1):
            yield from rec(prefix + (a,), remaining - a, slots - 1)

    for total in range(max_total + 1):
        for alpha in rec((), total, n):
            if sum(alpha) == total:
                yield alpha


def iter_below(alpha: Index) -> Iterator[Index]:
    """All beta with 0 <= beta <= alpha componentwise."""
    if not alpha:
        yield ()
        return
    head, rest = alpha[0], alpha[1:]
    for b in range(head + 1):
        for tail in iter_below(rest):
            yield (b,) + tail


def int_pow(k: Index, alpha: Index) -> int:
    """k^alpha for a lattice point; exact integer arithmetic."""
    out = 1
    for base, exp in zip(k, alpha):
        out *= base ** exp
    return out


# ---------------------------------------------------------------------------
# deformation data


@dataclass(frozen=True)
class DeformationMatrix:
    """Antisymmetric real n x n matrix fixing the deformation.

    Integer-entry matrices give back the commutative torus algebra: the
    pairing <k, theta l> is then an even integer plus antisymmetry, so the
    cocycle collapses to +-1 and in fact to 1 on the diagonal combinations
    that matter.
    """

    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.rows)
        for r in self.rows:
            if len(r) != n:
                raise ValueError("deformation matrix must be square")
        for i in range(n):
            for j in range(n):
                if self.rows[i][j] != -self.rows[j][i]:
                    raise ValueError("deformation matrix must be antisymmetric")

    @classmethod
    def zero(cls, n: int) -> "DeformationMatrix":
        return cls(tuple(tuple(0.0 for _ in range(n)) for _ in range(n)))

    @classmethod
    def two_torus(cls, theta0: float) -> "DeformationMatrix":
        """The single-parameter n=2 family [[0, theta0], [-theta0, 0]]."""
        return cls(((0.0, float(theta0)), (-float(theta0), 0.0)))

    @classmethod
    def from_array(cls, arr) -> "DeformationMatrix":
        a = np.asarray(arr, dtype=float)
        return cls(tuple(tuple(float(x) for x in row) for row in a))

    @property
    def n(self) -> int:
        return len(self.rows)

    @cached_property
    def arr(self) -> np.ndarray:
        a = np.array(self.rows, dtype=float)
        a.setflags(write=False)
        return a

    def pairing(self, k: Iterable[int], l: Iterable[int]) -> float:
        """<k, theta l>."""
        return float(np.asarray(k, dtype=float) @ self.arr @ np.asarray(l, dtype=float))

    def is_integer(self) -> bool:
        return bool(np.all(self.arr == np.round(self.arr)))


def cocycle(theta: DeformationMatrix, k: Index, l: Index) -> complex:
    """c(k, l) = exp(-pi i <k, theta l>).

    The pairing is reduced mod 2 before exponentiation so that huge lattice
    points do not lose the phase to floating point.
    """
    x = theta.pairing(k, l)
    return cmath.exp(-1j * math.pi * math.remainder(x, 2.0))


# ---------------------------------------------------------------------------
# finite Weyl series


@dataclass(frozen=True)
class WeylSeries:
    """Finitely supported element sum_k a_k U_k of the deformed algebra."""

    theta: DeformationMatrix
    coeffs: Mapping[Index, complex]

    def __post_init__(self) -> None:
        n = self.theta.n
        clean: dict[Index, complex] = {}
        for k, c in self.coeffs.items():
            if len(k) != n:
                raise ValueError(f"index {k} has wrong length for dimension {n}")
            c = complex(c)
            if abs(c) >= PRUNE_FLOOR:
                clean[tuple(int(x) for x in k)] = c
        object.__setattr__(self, "coeffs", clean)

    # -- constructors

    @classmethod
    def zero(cls, theta: DeformationMatrix) -> "WeylSeries":
        return cls(theta, {})

    @classmethod
    def unit(cls, theta: DeformationMatrix) -> "WeylSeries":
        return cls(theta, {(0,) * theta.n: 1.0 + 0.0j})

    @classmethod
    def monomial(cls, theta: DeformationMatrix, k: Iterable[int], c: complex = 1.0) -> "WeylSeries":
        return cls(theta, {tuple(int(x) for x in k): complex(c)})

    # -- basic structure

    @property
    def dim(self) -> int:
        return self.theta.n

    def support(self) -> set[Index]:
        return set(self.coeffs)

    def __getitem__(self, k: Index) -> complex:
        return self.coeffs.get(tuple(k), 0.0 + 0.0j)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.coeffs.values())

    def truncate(self, floor: float) -> "WeylSeries":
        """Drop coefficients with |a_k| < floor.  The only lossy operation."""
        return WeylSeries(self.theta, {k: c for k, c in self.coeffs.items() if abs(c) >= floor})

    def _require_same_algebra(self, other: "WeylSeries") -> None:
        if self.theta != other.theta:
            raise ValueError("operands live in different deformed algebras")

    # -- linear operations

    def __add__(self, other: "WeylSeries") -> "WeylSeries":
        self._require_same_algebra(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0.0) + c
        return WeylSeries(self.theta, out)

    def __sub__(self, other: "WeylSeries") -> "WeylSeries":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "WeylSeries":
        if isinstance(scalar, WeylSeries):
            return NotImplemented
        return WeylSeries(self.theta, {k: scalar * c for k, c in self.coeffs.items()})

    def __neg__(self) -> "WeylSeries":
        return (-1.0) * self

    # -- product and involution

    def __mul__(self, other) -> "WeylSeries":
        if not isinstance(other, WeylSeries):
            return NotImplemented
        return weyl_mul(self, other)

    def adjoint(self) -> "WeylSeries":
        """a* = sum_k conj(a_k) U_{-k}; U_k* = U_{-k} needs no cocycle factor."""
        return WeylSeries(
            self.theta,
            {tuple(-x for x in k): c.conjugate() for k, c in self.coeffs.items()},
        )

    # -- trace, derivations, pairings

    def tau(self) -> complex:
        """The canonical trace: the coefficient at the lattice origin."""
        return self.coeffs.get((0,) * self.dim, 0.0 + 0.0j)

    def delta(self, alpha: Index) -> "WeylSeries":
        """delta^alpha (sum a_k U_k) = sum a_k k^alpha U_k."""
        if len(alpha) != self.dim:
            raise ValueError("derivation multi-index has wrong length")
        return WeylSeries(
            self.theta,
            {k: c * int_pow(k, alpha) for k, c in self.coeffs.items()},
        )

    def inner(self, other: "WeylSeries") -> complex:
        """<a, b> = tau(a b*) = sum_k a_k conj(b_k)."""
        self._require_same_algebra(other)
        small, big = self.coeffs, other.coeffs
        return sum(c * big[k].conjugate() for k, c in small.items() if k in big)

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def seminorm_q(self, N: int) -> float:
        """q_N(a) = sup_k <k>^N |a_k|; the defining seminorms of the smooth algebra."""
        if not self.coeffs:
            return 0.0
        return max(bracket(k) ** N * abs(c) for k, c in self.coeffs.items())

    def sobolev_inner(self, s: float, other: "WeylSeries") -> complex:
        """Bilinear Sobolev pairing <a, b>_s = sum_k <k>^(2s) a_k b_k."""
        self._require_same_algebra(other)
        return sum(
            bracket(k) ** (2.0 * s) * c * other.coeffs[k]
            for k, c in self.coeffs.items()
            if k in other.coeffs
        )

    # -- display

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            parts.append(f"({c.real:+.12g}{c.imag:+.12g}j) U_{k}")
        return " + ".join(parts)


def weyl_mul(a: WeylSeries, b: WeylSeries) -> WeylSeries:
    """Product sum_{k,l} a_k b_l c(k,l) U_{k+l}."""
    a._require_same_algebra(b)
    theta = a.theta
    out: dict[Index, complex] = {}
    for k, ck in a.coeffs.items():
        for l, cl in b.coeffs.items():
            idx = mi_add(k, l)
            out[idx] = out.get(idx, 0.0) + ck * cl * cocycle(theta, k, l)
    return WeylSeries(theta, out)


def tau(a: WeylSeries) -> complex:
    return a.tau()


def delta(alpha: Index, a: WeylSeries) -> WeylSeries:
    return a.delta(alpha)


def inner(a: WeylSeries, b: WeylSeries) -> complex:
    return a.inner(b)


def sobolev_inner(s: float, a: WeylSeries, b: WeylSeries) -> complex:
    return a.sobolev_inner(s, b)
