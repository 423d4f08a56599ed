"""Formal series in the shift symbol with exact validity windows.

A :class:`LambdaSeries` stores ``sum_j c_j Lambda^j`` together with an
interval ``[lo, hi]`` (ends may be infinite) on which the stored coefficients
are exact.  Outside the window nothing is known.  A series with an infinite
lower end has a known finite bottom degree, and symmetrically for the top.

Composition propagates windows: the coefficient of ``Lambda^j`` in ``X o Y``
is exact when every product involving an unknown coefficient of one factor
meets a known zero of the other.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .calculus import shift
from .ring import LATTICE, Poly

INF = math.inf


class WindowError(ValueError):
    """A coefficient outside the exact window was requested, or a composition
    has an empty window."""


def _as_poly(f) -> Poly:
    if isinstance(f, Poly):
        return f
    return Poly.const(f, LATTICE)


class LambdaSeries:
    __slots__ = ("coeffs", "lo", "hi")

    def __init__(self, coeffs=None, lo=-INF, hi=INF):
        if lo > hi:
            raise WindowError(f"empty window [{lo}, {hi}]")
        self.lo, self.hi = lo, hi
        self.coeffs = {}
        for j, c in (coeffs or {}).items():
            c = _as_poly(c)
            if c and lo <= j <= hi:
                self.coeffs[j] = c

    # -- constructors ---------------------------------------------------------
    @classmethod
    def lam(cls, j: int = 1) -> "LambdaSeries":
        """The operator ``Lambda^j``."""
        return cls({j: Poly.const(1, LATTICE)})

    @classmethod
    def scalar(cls, f) -> "LambdaSeries":
        """Multiplication by the function ``f``."""
        return cls({0: _as_poly(f)})

    @classmethod
    def zero(cls) -> "LambdaSeries":
        return cls({})

    # -- window data ------------------------------------------------------------
    @property
    def top(self):
        if self.hi < INF:
            return INF
        return max(self.coeffs) if self.coeffs else -INF

    @property
    def bottom(self):
        if self.lo > -INF:
            return -INF
        return min(self.coeffs) if self.coeffs else INF

    def is_finite(self) -> bool:
        return self.lo == -INF and self.hi == INF

    def coeff(self, j: int) -> Poly:
        if not self.lo <= j <= self.hi:
            raise WindowError(f"Lambda^{j} outside exact window [{self.lo}, {self.hi}]")
        return self.coeffs.get(j, Poly.const(0, LATTICE))

    def residue(self) -> Poly:
        """Coefficient of Lambda^0."""
        return self.coeff(0)

    # -- arithmetic -----------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, LambdaSeries):
            other = LambdaSeries.scalar(other)
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        out = dict(self.coeffs)
        for j, c in other.coeffs.items():
            out[j] = out[j] + c if j in out else c
        return LambdaSeries(out, lo, hi)

    __radd__ = __add__

    def __neg__(self):
        return LambdaSeries({j: -c for j, c in self.coeffs.items()}, self.lo, self.hi)

    def __sub__(self, other):
        if not isinstance(other, LambdaSeries):
            other = LambdaSeries.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return LambdaSeries.scalar(other) - self

    def __mul__(self, c):
        """Multiplication by a rational constant."""
        if isinstance(c, (int, Fraction)):
            return LambdaSeries({j: v * c for j, v in self.coeffs.items()}, self.lo, self.hi)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, LambdaSeries):
            other = LambdaSeries.scalar(other)
        return compose(self, other)

    def __rmatmul__(self, other):
        return compose(LambdaSeries.scalar(other), self)

    def __eq__(self, other):
        if not isinstance(other, LambdaSeries):
            return NotImplemented
        return (self.lo, self.hi) == (other.lo, other.hi) and self.coeffs == other.coeffs

    def same_on(self, other: "LambdaSeries", lo, hi) -> bool:
        return all(self.coeff(j) == other.coeff(j) for j in range(lo, hi + 1))

    def power(self, k: int) -> "LambdaSeries":
        if k < 1:
            raise ValueError("power needs k >= 1")
        result = self
        for _ in range(k - 1):
            result = compose(result, self)
        return result

    def project_plus(self, include_zero: bool = True) -> "LambdaSeries":
        """Keep powers j >= 0 (j > 0 when ``include_zero`` is False)."""
        cut = 0 if include_zero else 1
        if self.lo > cut:
            raise WindowError(f"window [{self.lo}, {self.hi}] does not reach Lambda^{cut}")
        return LambdaSeries({j: c for j, c in self.coeffs.items() if j >= cut}, -INF, self.hi)

    def project_minus(self, include_zero: bool = False) -> "LambdaSeries":
        """Keep powers j < 0 (j <= 0 when ``include_zero`` is True)."""
        cut = 0 if include_zero else -1
        if self.hi < cut:
            raise WindowError(f"window [{self.lo}, {self.hi}] does not reach Lambda^{cut}")
        return LambdaSeries({j: c for j, c in self.coeffs.items() if j <= cut}, self.lo, INF)

    def adjoint(self) -> "LambdaSeries":
        """Formal adjoint: (f Lambda^j)^dagger = Lambda^{-j} o f."""
        return LambdaSeries({-j: shift(c, -j) for j, c in self.coeffs.items()}, -self.hi, -self.lo)

    def inverse(self, depth: int, direction: str = "down") -> "LambdaSeries":
        return truncated_inverse(self, depth, direction)

    def apply(self, f) -> Poly:
        """Action on a function: sum_j c_j Lambda^j(f)."""
        if not self.is_finite():
            raise WindowError("only finite operators act on functions")
        f = _as_poly(f)
        out = Poly.const(0, LATTICE)
        for j, c in self.coeffs.items():
            out = out + c * shift(f, j)
        return out

    def __str__(self):
        if not self.coeffs:
            body = "0"
        else:
            body = " + ".join(f"({self.coeffs[j]})L^{j}" for j in sorted(self.coeffs, reverse=True))
        return body if self.is_finite() else f"{body}  [exact on {self.lo}..{self.hi}]"

    __repr__ = __str__


def compose(X: LambdaSeries, Y: LambdaSeries) -> LambdaSeries:
    """(f Lambda^a) o (g Lambda^b) = f Lambda^a(g) Lambda^{a+b}, with window
    propagation."""
    lo = max(-INF if X.lo == -INF else X.lo + Y.top,
             -INF if Y.lo == -INF else Y.lo + X.top)
    hi = min(INF if X.hi == INF else X.hi + Y.bottom,
             INF if Y.hi == INF else Y.hi + X.bottom)
    if lo > hi:
        raise WindowError("composition has an empty exact window")
    out: dict = {}
    for a, f in X.coeffs.items():
        for b, g in Y.coeffs.items():
            j = a + b
            if lo <= j <= hi:
                term = f * shift(g, a)
                out[j] = out[j] + term if j in out else term
    return LambdaSeries(out, lo, hi)


def truncated_inverse(X: LambdaSeries, depth: int, direction: str = "down") -> LambdaSeries:
    """Geometric-series inverse.

    ``direction='down'`` factors out the top term (series in Lambda^{-1}, as
    for B = 1 - Q Lambda^{-1}); ``'up'`` factors out the bottom term (as for
    A = Lambda - P).  The leading coefficient must be a Laurent monomial.
    """
    if direction == "down":
        if X.hi != INF or not X.coeffs:
            raise WindowError("downward inverse needs a known top term")
        m = max(X.coeffs)
    elif direction == "up":
        if X.lo != -INF or not X.coeffs:
            raise WindowError("upward inverse needs a known bottom term")
        m = min(X.coeffs)
    else:
        raise ValueError(direction)
    lead = X.coeffs[m]
    if not lead.is_monomial():
        raise ValueError(f"leading coefficient {lead} is not invertible")
    t_inv = LambdaSeries({-m: shift(lead.inverse(), -m)})
    rest = X - LambdaSeries({m: lead})
    N = compose(t_inv, rest)
    term = LambdaSeries.scalar(1)
    total = LambdaSeries.scalar(1)
    for _ in range(depth):
        term = compose(term, -N)
        total = total + term
    if direction == "down":
        total = LambdaSeries(total.coeffs, max(total.lo, -depth), total.hi)
    else:
        total = LambdaSeries(total.coeffs, total.lo, min(total.hi, depth))
    return compose(total, t_inv)


class MatrixLambdaOp:
    """2x2 matrix of Lambda-series (Hamiltonian operators and Jacobians)."""

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[Sequence]):
        self.entries = [[e if isinstance(e, LambdaSeries) else LambdaSeries.scalar(e) for e in row]
                        for row in entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def window(self):
        flat = [e for row in self.entries for e in row]
        return max(e.lo for e in flat), min(e.hi for e in flat)

    def __add__(self, other):
        return MatrixLambdaOp([[self[i, j] + other[i, j] for j in range(2)] for i in range(2)])

    def __neg__(self):
        return MatrixLambdaOp([[-self[i, j] for j in range(2)] for i in range(2)])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return MatrixLambdaOp([[self[i, j] * c for j in range(2)] for i in range(2)])

    __rmul__ = __mul__

    def __matmul__(self, other):
        return MatrixLambdaOp([[compose(self[i, 0], other[0, j]) + compose(self[i, 1], other[1, j])
                                for j in range(2)] for i in range(2)])

    def __eq__(self, other):
        if not isinstance(other, MatrixLambdaOp):
            return NotImplemented
        return all(self[i, j] == other[i, j] for i in range(2) for j in range(2))

    def adjoint(self) -> "MatrixLambdaOp":
        return MatrixLambdaOp([[self[j, i].adjoint() for j in range(2)] for i in range(2)])

    def apply(self, vec) -> list:
        return [self[i, 0].apply(vec[0]) + self[i, 1].apply(vec[1]) for i in range(2)]

    def map_coefficients(self, f) -> "MatrixLambdaOp":
        return MatrixLambdaOp([[LambdaSeries({k: f(c) for k, c in self[i, j].coeffs.items()},
                                             self[i, j].lo, self[i, j].hi)
                                for j in range(2)] for i in range(2)])

    def __str__(self):
        return "\n".join(f"[{i},{j}] {self[i, j]}" for i in range(2) for j in range(2))
