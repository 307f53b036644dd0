"""Quantisation of toroidal symbols and the induced star product.

Op(sigma) acts on a finite series by  a = sum a_k U_k  |->  sum a_k sigma(k) U_k.
The map is a bijection onto operators with finite propagation on the Weyl
basis; its inverse reads the symbol off as sigma(k) = A(U_k) U_{-k}.  The
transported composition is the star product

    (sigma o tau)(k) = sum_l tau_l(k) sigma(l + k) U_l,

summed over the (finite) Weyl support of tau(k).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import (
    DeformationMatrix,
    Index,
    WeylSeries,
    mi_abs,
    mi_add,
    mi_factorial,
    iter_multiindices,
)
from .finitepart import Polytope, exponent_ladder, fit_finite_part
from .symbols import SymbolExpr, pointwise_mul, scalar_at


def op_apply(sigma, a: WeylSeries) -> WeylSeries:
    """Apply the quantisation of sigma to a finite series."""
    if sigma.theta != a.theta:
        raise ValueError("symbol and argument live over different deformations")
    out = WeylSeries.zero(a.theta)
    for k, c in a.coeffs.items():
        uk = WeylSeries.monomial(a.theta, k)
        out = out + c * (sigma.eval_lattice(k) * uk)
    return out


def dequantise(op: Callable[[WeylSeries], WeylSeries], theta: DeformationMatrix, k) -> WeylSeries:
    """Symbol value A(U_k) U_{-k}; inverts op_apply pointwise on the lattice."""
    uk = WeylSeries.monomial(theta, k)
    return op(uk) * uk.adjoint()


class DequantisedSymbol:
    """Lattice-evaluable symbol read off an operator via dequantise."""

    def __init__(self, op: Callable[[WeylSeries], WeylSeries], theta: DeformationMatrix, order: complex = 0.0):
        self.op = op
        self.theta = theta
        self.order = complex(order)

    @property
    def dim(self) -> int:
        return self.theta.n

    def eval_lattice(self, k) -> WeylSeries:
        return dequantise(self.op, self.theta, k)

    def scalar_at(self, k) -> complex:
        return self.eval_lattice(k).tau()


# ---------------------------------------------------------------------------
# matrix view


@dataclass
class SpillReport:
    """Mass of Op(sigma) U_k landing outside the basis window |l|_inf <= K."""

    window: int
    total_mass: float
    entries: list[tuple[Index, Index, complex]]

    @property
    def count(self) -> int:
        return len(self.entries)


def operator_matrix(sigma, K: int) -> tuple[np.ndarray, list[Index], SpillReport]:
    """Matrix of Op(sigma) on the Weyl basis {U_k : |k|_inf <= K}.

    Returns (matrix, basis order, spill report); entry [i, j] is the U_basis[i]
    coefficient of Op(sigma) U_basis[j].
    """
    n = sigma.dim
    axes = [range(-K, K + 1)] * n
    basis: list[Index] = []

    def rec(prefix: Index, slots: int) -> None:
        if slots == 0:
            basis.append(prefix)
            return
        for x in range(-K, K + 1):
            rec(prefix + (x,), slots - 1)

    rec((), n)
    index = {k: i for i, k in enumerate(basis)}
    D = len(basis)
    M = np.zeros((D, D), dtype=complex)
    spill: list[tuple[Index, Index, complex]] = []
    mass = 0.0
    for j, k in enumerate(basis):
        img = sigma.eval_lattice(k) * WeylSeries.monomial(sigma.theta, k)
        for l, c in img.coeffs.items():
            i = index.get(l)
            if i is None:
                spill.append((k, l, c))
                mass += abs(c)
            else:
                M[i, j] = c
    return M, basis, SpillReport(window=K, total_mass=mass, entries=spill)


# ---------------------------------------------------------------------------
# operator trace


class TraceNonConvergence(RuntimeError):
    """Raised when the operator-trace tail estimate will not meet rtol."""


def _shell_values(sigma, pts: np.ndarray) -> np.ndarray:
    if isinstance(sigma, SymbolExpr):
        return sigma.scalar_values(pts, lattice=True)
    return np.array([scalar_at(sigma, tuple(int(x) for x in p)) for p in pts], dtype=complex)


def op_trace(sigma, rtol: float = 1e-8, k_cap: int | None = None) -> complex:
    """Trace sum_k tau(sigma(k)) of a trace-class quantised symbol.

    Sums sup-norm shells outward.  Stops early if the declared-order envelope
    bound on the remaining tail drops below rtol; otherwise the partial sums
    are accelerated with the exponent ladder K^(order + n - j) and two
    staggered fit windows must agree within rtol.
    """
    n = sigma.dim
    m = complex(sigma.order)
    if m.real >= -n:
        raise ValueError(
            f"not trace-class by declared order: order {m} needs real part < -{n}"
        )
    if k_cap is None:
        k_cap = 512 if n <= 2 else 96
    cube = Polytope("cube")
    decay = -m.real  # > n
    geom = 2 * n * 3 ** (n - 1)

    partial: list[complex] = []
    env_prev = 0.0
    acc = 0.0 + 0.0j
    exps = exponent_ladder(m, n, drop_below=m.real + n - 7)
    check_at = 24

    N = 0
    while N <= k_cap:
        pts = cube.shell(N, n)
        vals = _shell_values(sigma, pts)
        acc += complex(np.sum(vals))
        partial.append(acc)
        w = (1.0 + np.einsum("ij,ij->i", pts.astype(float), pts.astype(float))) ** (decay / 2.0)
        env_here = float(np.max(np.abs(vals) * w)) if len(vals) else 0.0
        # envelope tail bound after shell N, cf. sum_{j>N} (2j+1)^(n-1) 2n <j>^(-decay)
        C_env = 2.0 * max(env_here, env_prev)
        env_prev = env_here
        if N >= 2:
            tail = C_env * geom * N ** (n - decay) / (decay - n)
            scale = max(abs(acc), 1e-300)
            if tail <= rtol * scale:
                return acc
            if N == check_at:
                rep_a = _trace_fit(partial, exps, N // 2, N)
                rep_b = _trace_fit(partial, exps, N // 3, N)
                if rep_a is not None and rep_b is not None:
                    disagree = abs(rep_a.value - rep_b.value)
                    err = disagree + rep_a.residual * max(1.0, abs(rep_a.value))
                    if err <= rtol * max(abs(rep_a.value), 1e-300):
                        return rep_a.value
                check_at = max(check_at + 4, int(check_at * 1.3))
        N += 1
    raise TraceNonConvergence(
        f"operator trace did not reach rtol={rtol} within |k|_inf <= {k_cap}"
    )


def _trace_fit(partial: list[complex], exps, lo: int, hi: int):
    Ns = np.arange(lo, hi + 1)
    vals = np.array(partial[lo:hi + 1])
    if len(Ns) < len(exps) + 4:
        return None
    return fit_finite_part(Ns, vals, exps, include_log=False)


# ---------------------------------------------------------------------------
# star product


def star_exact(sigma, tau, k) -> WeylSeries:
    """(sigma o tau)(k) = sum_l tau_l(k) sigma(l + k) U_l, exact."""
    if sigma.theta != tau.theta:
        raise ValueError("operands live over different deformations")
    theta = sigma.theta
    k = tuple(int(x) for x in k)
    tk = tau.eval_lattice(k)
    out = WeylSeries.zero(theta)
    for l, cl in tk.coeffs.items():
        sval = sigma.eval_lattice(mi_add(l, k))
        out = out + cl * (sval * WeylSeries.monomial(theta, l))
    return out


class StarSymbol:
    """The star product sigma o tau as a lattice-evaluable symbol."""

    def __init__(self, sigma, tau):
        if sigma.theta != tau.theta:
            raise ValueError("operands live over different deformations")
        self.sigma = sigma
        self.tau = tau
        self.theta = sigma.theta
        self.order = sigma.order + tau.order

    @property
    def dim(self) -> int:
        return self.theta.n

    def eval_lattice(self, k) -> WeylSeries:
        return star_exact(self.sigma, self.tau, k)

    def scalar_at(self, k) -> complex:
        # tau of sigma(l+k) U_l picks the coefficient at -l with its cocycle
        theta = self.theta
        k = tuple(int(x) for x in k)
        tk = self.tau.eval_lattice(k)
        out = 0.0 + 0.0j
        for l, cl in tk.coeffs.items():
            sval = self.sigma.eval_lattice(mi_add(l, k))
            out += cl * (sval * WeylSeries.monomial(theta, l)).tau()
        return out


class BracketSymbol:
    """The star bracket {sigma, tau} = sigma o tau - tau o sigma, evaluable."""

    def __init__(self, sigma, tau):
        self.fwd = StarSymbol(sigma, tau)
        self.rev = StarSymbol(tau, sigma)
        self.theta = self.fwd.theta
        self.order = self.fwd.order

    @property
    def dim(self) -> int:
        return self.theta.n

    def eval_lattice(self, k) -> WeylSeries:
        return self.fwd.eval_lattice(k) - self.rev.eval_lattice(k)

    def scalar_at(self, k) -> complex:
        return self.fwd.scalar_at(k) - self.rev.scalar_at(k)


def bracket_exact(sigma, tau, k) -> WeylSeries:
    return star_exact(sigma, tau, k) - star_exact(tau, sigma, k)


def star_asympt(sigma: SymbolExpr, tau: SymbolExpr, J: int) -> SymbolExpr:
    """Asymptotic star product through difference order J:

        sum_{|alpha| <= J} (1/alpha!) (d_xi^alpha sigma) bar-delta^alpha tau.

    The closed form serves as its own smooth extension, so the xi-derivatives
    are taken directly on it and restricted back to the lattice.
    """
    if not isinstance(sigma, SymbolExpr) or not isinstance(tau, SymbolExpr):
        raise TypeError("asymptotic star product needs closed-form symbols")
    if J < 0:
        raise ValueError("expansion order must be non-negative")
    n = sigma.dim
    out: SymbolExpr | None = None
    for alpha in iter_multiindices(n, J):
        piece = pointwise_mul(sigma.d_xi_multi(alpha), tau.bar_delta(alpha))
        piece = (1.0 / mi_factorial(alpha)) * piece
        out = piece if out is None else out + piece
    assert out is not None
    return out


def bracket_asympt(sigma: SymbolExpr, tau: SymbolExpr, J: int) -> SymbolExpr:
    return star_asympt(sigma, tau, J) - star_asympt(tau, sigma, J)


def bracket_homog(sigma: SymbolExpr, tau: SymbolExpr, degree: complex) -> SymbolExpr:
    """Homogeneous layer of the star bracket at the given degree.

    For classical factors of orders m, m' the bracket expands in homogeneous
    layers at degrees m + m' - j; the layer collects

        sum_{|alpha| + i + i' = j} (1/alpha!) [ (d^alpha sigma_{m-i}) bar-delta^alpha tau_{m'-i'}
                                               - (d^alpha tau_{m'-i'}) bar-delta^alpha sigma_{m-i} ].
    """
    if sigma.classical is None or tau.classical is None:
        raise ValueError("bracket layers need classical symbols on both sides")
    m, mp = sigma.classical.order, tau.classical.order
    jc = m + mp - complex(degree)
    j = round(jc.real)
    if abs(jc.imag) > 1e-9 or abs(jc.real - j) > 1e-9 or j < 0:
        raise ValueError(
            f"degree {degree} is not on the ladder m + m' - N of orders {m}, {mp}"
        )
    need = j
    for sym, name in ((sigma, "first"), (tau, "second")):
        if sym.classical.depth < need:
            raise ValueError(
                f"{name} factor resolved to depth {sym.classical.depth}, layer needs {need}"
            )
    n = sigma.dim
    out: SymbolExpr | None = None
    for alpha in iter_multiindices(n, j):
        a = mi_abs(alpha)
        inv_fact = 1.0 / mi_factorial(alpha)
        for i in range(j - a + 1):
            ip = j - a - i
            s_i = sigma.homog_component(i)
            t_ip = tau.homog_component(ip)
            fwd = pointwise_mul(s_i.d_xi_multi(alpha), t_ip.bar_delta(alpha))
            rev = pointwise_mul(t_ip.d_xi_multi(alpha), s_i.bar_delta(alpha))
            piece = inv_fact * (fwd - rev)
            out = piece if out is None else out + piece
    assert out is not None
    return out.with_classical(complex(degree), depth=0)
