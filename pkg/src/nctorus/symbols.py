"""Toroidal symbols with algebra-valued coefficients, in closed term form.

A symbol assigns to each lattice point (or real covector) an element of the
deformed algebra.  The closed form tracked here is a finite sum

    sigma(xi) = sum_l ( sum_t c_t xi^alpha_t <xi>^mb_t |xi|^s_t chi(xi)^[t] ) U_l

over Weyl indices l, where chi is a fixed smooth excision vanishing near 0.
This family is closed under d/dxi, pointwise products, bar-tau, bar-delta and
homogeneous-component extraction, which is all the calculus downstream needs.
Translations are not closed in this form and stay at the evaluation level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import (
    DeformationMatrix,
    Index,
    WeylSeries,
    bracket,
    cocycle,
    int_pow,
    iter_below,
    mi_abs,
    mi_add,
    mi_binomial,
    mi_sub,
)

PRUNE_FLOOR = 1e-300
# Tolerance for matching a term onto the homogeneous ladder m - j.
LADDER_TOL = 1e-9


# ---------------------------------------------------------------------------
# smooth cutoffs


def smooth_step(t):
    """h(t) = g(t) / (g(t) + g(1-t)) with g(t) = exp(-1/t) for t > 0.

    Identically 0 for t <= 0 and 1 for t >= 1, strictly increasing between,
    flat to all orders at both ends.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    lo = t <= 0.0
    hi = t >= 1.0
    mid = ~(lo | hi)
    out[lo] = 0.0
    out[hi] = 1.0
    tm = t[mid]
    g = np.exp(-1.0 / tm)
    gc = np.exp(-1.0 / (1.0 - tm))
    out[mid] = g / (g + gc)
    return float(out[0]) if scalar else out


def excision_radial(r):
    """chi as a function of |xi|: 0 on [0, 1/2], 1 on [1, inf)."""
    r = np.asarray(r, dtype=float)
    return smooth_step(2.0 * r - 1.0)


# ---------------------------------------------------------------------------
# scalar factors


def gbinom(z: complex, q: int) -> complex:
    """Generalised binomial coefficient z (z-1) ... (z-q+1) / q!."""
    out = 1.0 + 0.0j
    for i in range(q):
        out *= (z - i) / (i + 1)
    return out


@dataclass(frozen=True)
class ScalarTerm:
    """One factor c * xi^alpha * <xi>^bracket_exp * |xi|^radial_exp.

    Terms with a radial power are only smooth away from 0 and must carry the
    excision (construction-time check).  Exponents may be complex.
    """

    coeff: complex
    alpha: Index
    bracket_exp: complex = 0.0
    radial_exp: complex = 0.0
    excised: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeff", complex(self.coeff))
        object.__setattr__(self, "alpha", tuple(int(a) for a in self.alpha))
        object.__setattr__(self, "bracket_exp", complex(self.bracket_exp))
        object.__setattr__(self, "radial_exp", complex(self.radial_exp))
        if any(a < 0 for a in self.alpha):
            raise ValueError("monomial exponents must be non-negative")
        if self.radial_exp != 0 and not self.excised:
            raise ValueError("terms with a radial power must be excised")

    @property
    def total_order(self) -> complex:
        return mi_abs(self.alpha) + self.bracket_exp + self.radial_exp

    def key(self) -> tuple:
        return (self.alpha, self.bracket_exp, self.radial_exp, self.excised)

    # -- evaluation

    def value_lattice(self, k: Sequence[int]) -> complex:
        """Value at a lattice point; chi(k) is exactly 1 for k != 0, 0 at 0."""
        r2 = float(sum(x * x for x in k))
        if self.excised and r2 == 0.0:
            return 0.0
        val = self.coeff
        for x, a in zip(k, self.alpha):
            if a:
                val *= float(x) ** a
        if self.bracket_exp != 0:
            val *= (r2 + 1.0) ** (self.bracket_exp / 2.0)
        if self.radial_exp != 0:
            val *= r2 ** (self.radial_exp / 2.0)
        return val

    def value_real(self, xi: Sequence[float]) -> complex:
        r2 = float(sum(float(x) * float(x) for x in xi))
        chi = 1.0
        if self.excised:
            chi = excision_radial(math.sqrt(r2))
            if chi == 0.0:
                return 0.0
        val = self.coeff * chi
        for x, a in zip(xi, self.alpha):
            if a:
                val *= float(x) ** a
        if self.bracket_exp != 0:
            val *= (r2 + 1.0) ** (self.bracket_exp / 2.0)
        if self.radial_exp != 0:
            val *= r2 ** (self.radial_exp / 2.0)
        return val

    def values_array(self, pts: np.ndarray, lattice: bool) -> np.ndarray:
        """Vectorised evaluation over an (M, n) array of points."""
        pts = np.asarray(pts, dtype=float)
        r2 = np.einsum("ij,ij->i", pts, pts)
        val = np.full(len(pts), self.coeff, dtype=complex)
        for i, a in enumerate(self.alpha):
            if a:
                val *= pts[:, i] ** a
        if self.bracket_exp != 0:
            val *= np.exp((self.bracket_exp / 2.0) * np.log(r2 + 1.0))
        if self.excised:
            origin = r2 == 0.0
            if self.radial_exp != 0:
                safe = np.where(origin, 1.0, r2)
                val *= np.exp((self.radial_exp / 2.0) * np.log(safe))
            if lattice:
                val[origin] = 0.0
            else:
                val *= excision_radial(np.sqrt(r2))
        return val


@dataclass(frozen=True)
class ClassicalMeta:
    """Order and available expansion depth of a classical symbol."""

    order: complex
    depth: int


def default_depth(order: complex, n: int) -> int:
    """Expansion depth ceil(Re m + n) + 2, floored so component 0 exists."""
    return max(2, math.ceil(order.real + n) + 2)


# ---------------------------------------------------------------------------
# the closed-form symbol class


@dataclass(frozen=True)
class SymbolExpr:
    theta: DeformationMatrix
    terms: tuple[tuple[Index, tuple[ScalarTerm, ...]], ...]
    order: complex
    classical: ClassicalMeta | None = None
    # Set when an operation discarded a compactly supported smooth piece
    # (excision derivatives, squared excisions).  Lattice evaluation is
    # unaffected: those pieces vanish at every lattice point.
    smoothing_tail: bool = False

    @classmethod
    def build(
        cls,
        theta: DeformationMatrix,
        term_map: Mapping[Index, Iterable[ScalarTerm]],
        order: complex | None = None,
        classical: bool = True,
        depth: int | None = None,
        smoothing_tail: bool = False,
    ) -> "SymbolExpr":
        n = theta.n
        merged: dict[Index, dict[tuple, complex]] = {}
        for l, terms in term_map.items():
            l = tuple(int(x) for x in l)
            if len(l) != n:
                raise ValueError(f"Weyl index {l} has wrong length for dimension {n}")
            for t in terms:
                if len(t.alpha) != n:
                    raise ValueError("scalar term dimension mismatch")
                slot = merged.setdefault(l, {})
                slot[t.key()] = slot.get(t.key(), 0.0) + t.coeff
        clean: list[tuple[Index, tuple[ScalarTerm, ...]]] = []
        for l in sorted(merged):
            kept = tuple(
                ScalarTerm(c, *key)
                for key, c in sorted(merged[l].items(), key=lambda kv: repr(kv[0]))
                if abs(c) >= PRUNE_FLOOR
            )
            if kept:
                clean.append((l, kept))
        if order is None:
            all_terms = [t for _, ts in clean for t in ts]
            if not all_terms:
                order = -math.inf
            else:
                order = max((t.total_order for t in all_terms), key=lambda z: z.real)
        order = complex(order)
        for _, ts in clean:
            for t in ts:
                if t.total_order.real > order.real + LADDER_TOL:
                    raise ValueError(
                        f"term of order {t.total_order} exceeds declared order {order}"
                    )
        meta = None
        if classical and order.real != -math.inf:
            meta = ClassicalMeta(order, depth if depth is not None else default_depth(order, n))
        return cls(theta, tuple(clean), order, meta, smoothing_tail)

    # -- structure

    @property
    def dim(self) -> int:
        return self.theta.n

    def weyl_support(self) -> set[Index]:
        return {l for l, _ in self.terms}

    def is_scalar_valued(self) -> bool:
        zero = (0,) * self.dim
        return all(l == zero for l, _ in self.terms)

    def term_map(self) -> dict[Index, list[ScalarTerm]]:
        return {l: list(ts) for l, ts in self.terms}

    def with_classical(self, order: complex, depth: int | None = None) -> "SymbolExpr":
        meta = ClassicalMeta(complex(order), depth if depth is not None else default_depth(complex(order), self.dim))
        return replace(self, classical=meta)

    def is_zero(self) -> bool:
        return not self.terms

    # -- evaluation

    def eval_lattice(self, k: Sequence[int]) -> WeylSeries:
        k = tuple(int(x) for x in k)
        out: dict[Index, complex] = {}
        for l, ts in self.terms:
            v = sum(t.value_lattice(k) for t in ts)
            if v != 0:
                out[l] = v
        return WeylSeries(self.theta, out)

    def eval_real(self, xi: Sequence[float]) -> WeylSeries:
        out: dict[Index, complex] = {}
        for l, ts in self.terms:
            v = sum(t.value_real(xi) for t in ts)
            if v != 0:
                out[l] = v
        return WeylSeries(self.theta, out)

    def scalar_at(self, k: Sequence[int]) -> complex:
        """Value of bar-tau sigma at k, i.e. the Weyl-index-0 scalar part."""
        zero = (0,) * self.dim
        k = tuple(int(x) for x in k)
        for l, ts in self.terms:
            if l == zero:
                return sum(t.value_lattice(k) for t in ts)
        return 0.0 + 0.0j

    def scalar_values(self, pts: np.ndarray, lattice: bool = True) -> np.ndarray:
        """Vectorised bar-tau sigma over an (M, n) array of points."""
        pts = np.asarray(pts, dtype=float)
        zero = (0,) * self.dim
        out = np.zeros(len(pts), dtype=complex)
        for l, ts in self.terms:
            if l == zero:
                for t in ts:
                    out += t.values_array(pts, lattice=lattice)
        return out

    # -- calculus

    def d_xi(self, i: int) -> "SymbolExpr":
        """Partial derivative in xi_i of the closed form.

        Derivatives hitting the excision live in 1/2 < |xi| < 1 and are
        dropped; the smoothing_tail flag records this.  No lattice point sits
        in that annulus, so lattice evaluation stays exact.
        """
        if not 0 <= i < self.dim:
            raise ValueError("derivative direction out of range")
        new: dict[Index, list[ScalarTerm]] = {}
        dropped_excision = False
        for l, ts in self.terms:
            acc = new.setdefault(l, [])
            for t in ts:
                if t.excised:
                    dropped_excision = True
                a_i = t.alpha[i]
                e_i = tuple(1 if j == i else 0 for j in range(self.dim))
                if a_i:
                    acc.append(
                        ScalarTerm(t.coeff * a_i, mi_sub(t.alpha, e_i), t.bracket_exp, t.radial_exp, t.excised)
                    )
                if t.bracket_exp != 0:
                    acc.append(
                        ScalarTerm(t.coeff * t.bracket_exp, mi_add(t.alpha, e_i), t.bracket_exp - 2, t.radial_exp, t.excised)
                    )
                if t.radial_exp != 0:
                    acc.append(
                        ScalarTerm(t.coeff * t.radial_exp, mi_add(t.alpha, e_i), t.bracket_exp, t.radial_exp - 2, t.excised)
                    )
        meta = self.classical
        return SymbolExpr.build(
            self.theta,
            new,
            order=self.order - 1,
            classical=meta is not None,
            depth=meta.depth if meta is not None else None,
            smoothing_tail=self.smoothing_tail or dropped_excision,
        )

    def d_xi_multi(self, alpha: Index) -> "SymbolExpr":
        out = self
        for i, a in enumerate(alpha):
            for _ in range(a):
                out = out.d_xi(i)
        return out

    def bar_tau(self) -> "SymbolExpr":
        zero = (0,) * self.dim
        kept = {l: ts for l, ts in self.terms if l == zero}
        meta = self.classical
        return SymbolExpr.build(
            self.theta,
            kept,
            order=self.order,
            classical=meta is not None,
            depth=meta.depth if meta is not None else None,
            smoothing_tail=self.smoothing_tail,
        )

    def bar_delta(self, alpha: Index) -> "SymbolExpr":
        """bar-delta^alpha: scale the U_l part by l^alpha."""
        if len(alpha) != self.dim:
            raise ValueError("bar_delta multi-index has wrong length")
        new: dict[Index, list[ScalarTerm]] = {}
        for l, ts in self.terms:
            w = int_pow(l, alpha)
            if w == 0:
                continue
            new[l] = [replace(t, coeff=t.coeff * w) for t in ts]
        meta = self.classical
        return SymbolExpr.build(
            self.theta,
            new,
            order=self.order,
            classical=meta is not None,
            depth=meta.depth if meta is not None else None,
            smoothing_tail=self.smoothing_tail,
        )

    def translate(self, l: Index) -> "TranslatedSymbol":
        return TranslatedSymbol(self, tuple(int(x) for x in l))

    def homog_component(self, j: int) -> "SymbolExpr":
        """Homogeneous component of degree (order - j) as excised pure powers.

        Each term xi^alpha <xi>^mb |xi|^s expands through
        <xi>^mb = |xi|^mb sum_q binom(mb/2, q) |xi|^(-2q); the degree-(m - j)
        slice collects the q with  (total term order) - 2q = m - j.
        """
        if self.classical is None:
            raise ValueError("symbol carries no classical (order, depth) data")
        if j < 0:
            raise ValueError("component index must be non-negative")
        if j > self.classical.depth:
            raise ValueError(
                f"component {j} beyond available depth {self.classical.depth}; "
                "rebuild the symbol with a larger depth"
            )
        m = self.classical.order
        new: dict[Index, list[ScalarTerm]] = {}
        for l, ts in self.terms:
            acc = new.setdefault(l, [])
            for t in ts:
                off = m - t.total_order
                if abs(off.imag) > LADDER_TOL:
                    continue
                o = round(off.real)
                if abs(off.real - o) > LADDER_TOL or o < 0:
                    continue
                q2 = j - o
                if q2 < 0 or q2 % 2:
                    continue
                q = q2 // 2
                c = t.coeff * gbinom(t.bracket_exp / 2.0, q)
                if c == 0:
                    continue
                acc.append(
                    ScalarTerm(
                        c,
                        t.alpha,
                        0.0,
                        t.bracket_exp + t.radial_exp - 2 * q,
                        excised=True,
                    )
                )
        return SymbolExpr.build(
            self.theta,
            new,
            order=m - j,
            depth=max(0, self.classical.depth - j),
        )

    # -- arithmetic

    def __add__(self, other: "SymbolExpr") -> "SymbolExpr":
        if not isinstance(other, SymbolExpr):
            return NotImplemented
        if self.theta != other.theta:
            raise ValueError("operands live over different deformations")
        new: dict[Index, list[ScalarTerm]] = {}
        for l, ts in self.terms + other.terms:
            new.setdefault(l, []).extend(ts)
        order = self.order if self.order.real >= other.order.real else other.order
        both_classical = self.classical is not None and other.classical is not None
        depth = None
        if both_classical:
            depth = min(self.classical.depth, other.classical.depth)
        return SymbolExpr.build(
            self.theta,
            new,
            order=order,
            classical=both_classical,
            depth=depth,
            smoothing_tail=self.smoothing_tail or other.smoothing_tail,
        )

    def __sub__(self, other: "SymbolExpr") -> "SymbolExpr":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "SymbolExpr":
        if isinstance(scalar, SymbolExpr):
            return NotImplemented
        new = {
            l: [replace(t, coeff=scalar * t.coeff) for t in ts] for l, ts in self.terms
        }
        meta = self.classical
        return SymbolExpr.build(
            self.theta,
            new,
            order=self.order,
            classical=meta is not None,
            depth=meta.depth if meta is not None else None,
            smoothing_tail=self.smoothing_tail,
        )

    def __mul__(self, other) -> "SymbolExpr":
        if not isinstance(other, SymbolExpr):
            return NotImplemented
        return pointwise_mul(self, other)

    def __str__(self) -> str:
        if not self.terms:
            return "0"

        def fmt(z: complex) -> str:
            return f"{z.real:.6g}" if z.imag == 0 else f"{z:.6g}"

        chunks = []
        for l, ts in self.terms:
            factors = []
            for t in ts:
                f = f"({fmt(t.coeff)})"
                if any(t.alpha):
                    f += " xi^" + str(t.alpha)
                if t.bracket_exp != 0:
                    f += f" <xi>^{fmt(t.bracket_exp)}"
                if t.radial_exp != 0:
                    f += f" |xi|^{fmt(t.radial_exp)}"
                if t.excised:
                    f += " chi"
                factors.append(f)
            chunks.append("[" + " + ".join(factors) + f"] U_{l}")
        return " + ".join(chunks)


# ---------------------------------------------------------------------------
# evaluation-level wrappers


class TranslatedSymbol:
    """T_l sigma = sigma(l + .): exact at the evaluation level only."""

    def __init__(self, base, shift: Index):
        self.base = base
        self.shift = tuple(int(x) for x in shift)
        self.theta = base.theta
        self.order = base.order

    @property
    def dim(self) -> int:
        return self.theta.n

    @property
    def classical(self):
        return getattr(self.base, "classical", None)

    def eval_lattice(self, k) -> WeylSeries:
        return self.base.eval_lattice(mi_add(tuple(int(x) for x in k), self.shift))

    def eval_real(self, xi) -> WeylSeries:
        shifted = tuple(float(x) + s for x, s in zip(xi, self.shift))
        return self.base.eval_real(shifted)

    def scalar_at(self, k) -> complex:
        return scalar_at(self.base, mi_add(tuple(int(x) for x in k), self.shift))

    def translate(self, l: Index) -> "TranslatedSymbol":
        return TranslatedSymbol(self.base, mi_add(self.shift, tuple(int(x) for x in l)))


class TabulatedSymbol:
    """Symbol given by a finite table of algebra values, zero off the table."""

    def __init__(self, theta: DeformationMatrix, table: Mapping[Index, WeylSeries], order: complex = 0.0):
        self.theta = theta
        self.table = {tuple(int(x) for x in k): v for k, v in table.items()}
        self.order = complex(order)

    @property
    def dim(self) -> int:
        return self.theta.n

    def eval_lattice(self, k) -> WeylSeries:
        return self.table.get(tuple(int(x) for x in k), WeylSeries.zero(self.theta))

    def scalar_at(self, k) -> complex:
        return self.eval_lattice(k).tau()

    def translate(self, l: Index) -> TranslatedSymbol:
        return TranslatedSymbol(self, l)


class PointwiseProduct:
    """Pointwise product of two lattice-evaluable symbols."""

    def __init__(self, a, b):
        if a.theta != b.theta:
            raise ValueError("operands live over different deformations")
        self.a = a
        self.b = b
        self.theta = a.theta
        self.order = a.order + b.order

    @property
    def dim(self) -> int:
        return self.theta.n

    def eval_lattice(self, k) -> WeylSeries:
        return self.a.eval_lattice(k) * self.b.eval_lattice(k)

    def scalar_at(self, k) -> complex:
        return self.eval_lattice(k).tau()


class PatchedSymbol:
    """Base symbol with finitely many lattice values overridden.

    A finite patch is a rapid-decay perturbation, so order and classical data
    pass through unchanged.
    """

    def __init__(self, base, patches: Mapping[Index, WeylSeries]):
        self.base = base
        self.patches = {tuple(int(x) for x in k): v for k, v in patches.items()}
        self.theta = base.theta
        self.order = base.order

    @property
    def dim(self) -> int:
        return self.theta.n

    @property
    def classical(self):
        return getattr(self.base, "classical", None)

    def eval_lattice(self, k) -> WeylSeries:
        k = tuple(int(x) for x in k)
        if k in self.patches:
            return self.patches[k]
        return self.base.eval_lattice(k)

    def scalar_at(self, k) -> complex:
        k = tuple(int(x) for x in k)
        if k in self.patches:
            return self.patches[k].tau()
        return scalar_at(self.base, k)

    def translate(self, l: Index) -> TranslatedSymbol:
        return TranslatedSymbol(self, l)


class CallableSymbol:
    """Symbol wrapping an arbitrary lattice (and maybe real) evaluation map."""

    def __init__(self, theta: DeformationMatrix, fn, order: complex, real_fn=None):
        self.theta = theta
        self.fn = fn
        self.real_fn = real_fn
        self.order = complex(order)

    @property
    def dim(self) -> int:
        return self.theta.n

    def eval_lattice(self, k) -> WeylSeries:
        return self.fn(tuple(int(x) for x in k))

    def eval_real(self, xi) -> WeylSeries:
        if self.real_fn is None:
            raise ValueError("symbol has no smooth evaluation")
        return self.real_fn(tuple(float(x) for x in xi))

    def scalar_at(self, k) -> complex:
        return self.eval_lattice(k).tau()


# ---------------------------------------------------------------------------
# free functions (the public calculus API)


def eval_lattice(sigma, k) -> WeylSeries:
    return sigma.eval_lattice(k)


def eval_real(sigma, xi) -> WeylSeries:
    return sigma.eval_real(xi)


def scalar_at(sigma, k) -> complex:
    if hasattr(sigma, "scalar_at"):
        return sigma.scalar_at(k)
    return sigma.eval_lattice(k).tau()


def d_xi(i: int, sigma: SymbolExpr) -> SymbolExpr:
    return sigma.d_xi(i)


def fwd_diff(beta: Index, sigma, k) -> WeylSeries:
    """Iterated forward difference Delta^beta sigma at k, by inclusion-exclusion."""
    k = tuple(int(x) for x in k)
    theta = sigma.theta
    out = WeylSeries.zero(theta)
    b_abs = mi_abs(beta)
    for gamma in iter_below(beta):
        sign = (-1) ** (b_abs - mi_abs(gamma))
        w = sign * mi_binomial(beta, gamma)
        out = out + float(w) * sigma.eval_lattice(mi_add(k, gamma))
    return out


def translate(l: Index, sigma) -> TranslatedSymbol:
    if hasattr(sigma, "translate"):
        return sigma.translate(l)
    return TranslatedSymbol(sigma, tuple(int(x) for x in l))


def bar_tau(sigma):
    """Scalar part of a symbol: keep the Weyl-index-0 coefficient."""
    if isinstance(sigma, SymbolExpr):
        return sigma.bar_tau()
    return _BarTauWrapped(sigma)


class _BarTauWrapped:
    def __init__(self, base):
        self.base = base
        self.theta = base.theta
        self.order = base.order

    @property
    def dim(self) -> int:
        return self.theta.n

    @property
    def classical(self):
        return getattr(self.base, "classical", None)

    def eval_lattice(self, k) -> WeylSeries:
        v = scalar_at(self.base, k)
        return WeylSeries(self.theta, {(0,) * self.dim: v})

    def scalar_at(self, k) -> complex:
        return scalar_at(self.base, k)

    def translate(self, l: Index) -> TranslatedSymbol:
        return TranslatedSymbol(self, l)


def iota(sigma):
    """Embed a scalar-valued symbol at Weyl index 0.

    Scalar-valued symbols are represented with Weyl support {0} already, so
    this checks the support and returns the symbol; bar_tau . iota = id.
    """
    if isinstance(sigma, SymbolExpr):
        if not sigma.is_scalar_valued():
            raise ValueError("iota expects a scalar-valued symbol")
        return sigma
    return _BarTauWrapped(sigma)


def bar_delta(alpha: Index, sigma):
    if isinstance(sigma, SymbolExpr):
        return sigma.bar_delta(alpha)
    return _BarDeltaWrapped(sigma, tuple(int(a) for a in alpha))


class _BarDeltaWrapped:
    def __init__(self, base, alpha: Index):
        self.base = base
        self.alpha = alpha
        self.theta = base.theta
        self.order = base.order

    @property
    def dim(self) -> int:
        return self.theta.n

    def eval_lattice(self, k) -> WeylSeries:
        v = self.base.eval_lattice(k)
        return v.delta(self.alpha)

    def eval_real(self, xi) -> WeylSeries:
        v = self.base.eval_real(xi)
        return v.delta(self.alpha)

    def scalar_at(self, k) -> complex:
        return self.eval_lattice(k).tau()


def pointwise_mul(a: SymbolExpr, b: SymbolExpr) -> SymbolExpr:
    """Closed-form pointwise product with the cocycle on Weyl indices.

    chi^2 and chi only differ inside the excision annulus, which contains no
    lattice point; when two excised factors meet, the result keeps one chi
    and raises smoothing_tail.
    """
    if a.theta != b.theta:
        raise ValueError("operands live over different deformations")
    theta = a.theta
    new: dict[Index, list[ScalarTerm]] = {}
    squared_excision = False
    for l1, ts1 in a.terms:
        for l2, ts2 in b.terms:
            l = mi_add(l1, l2)
            c = cocycle(theta, l1, l2)
            acc = new.setdefault(l, [])
            for t1 in ts1:
                for t2 in ts2:
                    if t1.excised and t2.excised:
                        squared_excision = True
                    acc.append(
                        ScalarTerm(
                            c * t1.coeff * t2.coeff,
                            mi_add(t1.alpha, t2.alpha),
                            t1.bracket_exp + t2.bracket_exp,
                            t1.radial_exp + t2.radial_exp,
                            t1.excised or t2.excised,
                        )
                    )
    both_classical = a.classical is not None and b.classical is not None
    depth = None
    if both_classical:
        depth = min(a.classical.depth, b.classical.depth)
    return SymbolExpr.build(
        theta,
        new,
        order=a.order + b.order,
        classical=both_classical,
        depth=depth,
        smoothing_tail=a.smoothing_tail or b.smoothing_tail or squared_excision,
    )


def homog_component(sigma: SymbolExpr, j: int) -> SymbolExpr:
    return sigma.homog_component(j)


# ---------------------------------------------------------------------------
# builders


def bracket_power(
    theta: DeformationMatrix,
    exponent: complex,
    weyl: Index | None = None,
    coeff: complex = 1.0,
    depth: int | None = None,
) -> SymbolExpr:
    """coeff <xi>^exponent U_weyl."""
    n = theta.n
    l = (0,) * n if weyl is None else tuple(int(x) for x in weyl)
    term = ScalarTerm(coeff, (0,) * n, bracket_exp=exponent)
    return SymbolExpr.build(theta, {l: [term]}, depth=depth)


def radial_power(
    theta: DeformationMatrix,
    exponent: complex,
    weyl: Index | None = None,
    coeff: complex = 1.0,
    depth: int | None = None,
) -> SymbolExpr:
    """coeff |xi|^exponent chi(xi) U_weyl (vanishes at the origin)."""
    n = theta.n
    l = (0,) * n if weyl is None else tuple(int(x) for x in weyl)
    term = ScalarTerm(coeff, (0,) * n, radial_exp=exponent, excised=True)
    return SymbolExpr.build(theta, {l: [term]}, depth=depth)


def monomial(
    theta: DeformationMatrix,
    alpha: Index,
    weyl: Index | None = None,
    coeff: complex = 1.0,
) -> SymbolExpr:
    """coeff xi^alpha U_weyl."""
    n = theta.n
    l = (0,) * n if weyl is None else tuple(int(x) for x in weyl)
    term = ScalarTerm(coeff, tuple(int(a) for a in alpha))
    return SymbolExpr.build(theta, {l: [term]})


def constant_symbol(theta: DeformationMatrix, a) -> SymbolExpr:
    """The constant symbol with value a (a WeylSeries or a scalar)."""
    if not isinstance(a, WeylSeries):
        a = WeylSeries(theta, {(0,) * theta.n: complex(a)})
    n = theta.n
    term_map = {l: [ScalarTerm(c, (0,) * n)] for l, c in a.coeffs.items()}
    return SymbolExpr.build(theta, term_map, order=0.0)
