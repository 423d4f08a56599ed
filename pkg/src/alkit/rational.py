"""Reduced fractions of ring elements.

Only the multivariate gcd is delegated to sympy; everything else stays in
:class:`~alkit.ring.Poly`.  The canonical form is: numerator and denominator
coprime polynomials, denominator monic in sympy's lex order, and whenever the
quotient is a Laurent polynomial it is stored with denominator 1.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

import sympy

from .ring import ONE, Poly, _merge_mode, _vkey

_SYMBOLS: dict = {}
_VARS: dict = {}


def _symbol(v):
    s = _SYMBOLS.get(v)
    if s is None:
        name, idx = v
        tag = "p" if idx is None else (f"m{-idx}" if idx < 0 else str(idx))
        s = sympy.Symbol(f"{name}__{tag}")
        _SYMBOLS[v] = s
        _VARS[s] = v
    return s


def _laurent_shift(*polys: Poly) -> dict:
    """Exponent vector that clears every negative power in ``polys``."""
    low: dict = {}
    for p in polys:
        for (e, _o), _c in p.terms.items():
            for v, k in e:
                if k < low.get(v, 0):
                    low[v] = k
    return {v: -k for v, k in low.items()}


def _monomial(exps: dict, mode) -> Poly:
    if not exps:
        return Poly.const(1, mode)
    even = tuple(sorted(exps.items(), key=lambda it: _vkey(it[0])))
    return Poly({(even, ()): Fraction(1)}, mode)


def _to_sympy(p: Poly, gens):
    terms = {}
    index = {g: i for i, g in enumerate(gens)}
    for (e, o), c in p.terms.items():
        if o:
            raise ValueError("odd generators are not allowed in fractions")
        mono = [0] * len(gens)
        for v, k in e:
            mono[index[_symbol(v)]] = k
        terms[tuple(mono)] = sympy.Rational(c.numerator, c.denominator)
    return sympy.Poly.from_dict(terms, *gens, domain=sympy.QQ) if gens else sympy.Poly(
        terms.get((), 0), sympy.Symbol("_dummy"), domain=sympy.QQ)


def _from_sympy(sp: sympy.Poly, mode) -> Poly:
    out = {}
    gens = sp.gens
    for mono, c in sp.terms():
        even = []
        for g, k in zip(gens, mono):
            if k and g in _VARS:
                even.append((_VARS[g], k))
        even.sort(key=lambda it: _vkey(it[0]))
        out[(tuple(even), ())] = Fraction(int(c.p), int(c.q))
    return Poly._from_raw(out, mode)


class RatExpr:
    """Reduced fraction ``num / den`` of even ring elements."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, normalized: bool = False):
        if not isinstance(num, Poly):
            num = Poly.const(num)
        if den is None:
            den = Poly.const(1, num.mode)
        elif not isinstance(den, Poly):
            den = Poly.const(den)
        if normalized:
            self.num, self.den = num, den
            return
        self.num, self.den = _normalize(num, den)

    @property
    def mode(self):
        return _merge_mode(self.num.mode, self.den.mode)

    @classmethod
    def of(cls, x) -> "RatExpr":
        if isinstance(x, RatExpr):
            return x
        if isinstance(x, Poly):
            return cls(x, Poly.const(1, x.mode), normalized=True)
        return cls(Poly.const(x), normalized=True)

    def is_laurent(self) -> bool:
        return self.den == ONE

    def as_poly(self) -> Poly:
        if not self.is_laurent():
            raise ValueError(f"not a Laurent polynomial: {self}")
        return self.num

    # -- arithmetic ------------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RatExpr(self.num + other.num, self.den)
        return RatExpr(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatExpr(-self.num, self.den, normalized=True)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return RatExpr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero fraction")
        return RatExpr(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return RatExpr(self.den ** (-n), self.num ** (-n))
        return RatExpr(self.num**n, self.den**n)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    # -- calculus ------------------------------------------------------------------
    def partial(self, v) -> "RatExpr":
        dn, dd = self.num.partial(v), self.den.partial(v)
        if dd.is_zero():
            return RatExpr(dn, self.den)
        return RatExpr(dn * self.den - self.num * dd, self.den * self.den)

    def map_indices(self, f) -> "RatExpr":
        return RatExpr(self.num.map_indices(f), self.den.map_indices(f))

    def substitute(self, mapping: Mapping) -> "RatExpr":
        return _subst(self.num, mapping) / _subst(self.den, mapping)

    def evaluate(self, assignment) -> float:
        d = self.den.evaluate(assignment)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the sample point")
        return self.num.evaluate(assignment) / d

    def even_vars(self) -> set:
        return self.num.even_vars() | self.den.even_vars()

    def __str__(self):
        if self.is_laurent():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RatExpr({self})"


def _coerce(x):
    if isinstance(x, RatExpr):
        return x
    if isinstance(x, (Poly, int, Fraction)):
        return RatExpr.of(x)
    return NotImplemented


def _subst(p: Poly, mapping: Mapping) -> RatExpr:
    """Substitute variables by Poly or RatExpr images."""
    result = RatExpr.of(Poly.const(0, p.mode))
    cache: dict = {}
    for (e, o), c in p.terms.items():
        term = RatExpr.of(Poly({((), o): c}, p.mode))
        for v, k in e:
            if v in mapping:
                key = (v, k)
                if key not in cache:
                    cache[key] = RatExpr.of(mapping[v]) ** k
                term = term * cache[key]
            else:
                term = term * RatExpr.of(Poly({(((v, k),), ()): Fraction(1)}, p.mode))
        result = result + term
    return result


def _normalize(num: Poly, den: Poly):
    mode = _merge_mode(num.mode, den.mode)
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return Poly.const(0, mode), Poly.const(1, mode)
    if den.is_monomial():
        return (num * den.inverse()).with_mode(mode), Poly.const(1, mode)
    if den.odd_degrees() != {0}:
        raise ValueError("odd generators are not allowed in denominators")
    clear = _monomial(_laurent_shift(num, den), mode)
    num, den = num * clear, den * clear
    gens = sorted({_symbol(v) for p in (num, den) for v in p.even_vars()}, key=lambda s: s.name)
    sn, sd = _to_sympy(num, gens), _to_sympy(den, gens)
    g = sympy.gcd(sn, sd)
    sn, sd = sn.exquo(g), sd.exquo(g)
    lc = sd.LC()
    sn, sd = sn.quo_ground(lc), sd.quo_ground(lc)
    n, d = _from_sympy(sn, mode), _from_sympy(sd, mode)
    if d.is_monomial():
        return (n * d.inverse()).with_mode(mode), Poly.const(1, mode)
    return n, d
