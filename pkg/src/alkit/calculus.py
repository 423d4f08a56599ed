"""Shift action, derivations, variational calculus and local functionals.

Sign convention for odd variables: odd factors are kept sorted by
``(alpha, index)`` and ``d/d theta`` is the *left* derivative (the generator
is anticommuted to the front before it is removed).  Every bracket in the
package is computed under this single convention.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .rational import RatExpr
from .ring import JET, LATTICE, ModeError, Poly, _sort_odd, generator_base


class NotExactError(ValueError):
    """The expression is not a total x-derivative."""


class CanonicalFormError(ValueError):
    """The density is outside the class where uniform-shift normalization is a
    complete invariant."""


# -- lattice ---------------------------------------------------------------------

def shift(e, s: int):
    """Apply ``Lambda^s``: raise every lattice index by ``s``."""
    if e.mode == JET:
        raise ModeError("shift is only defined on lattice expressions")
    if s == 0:
        return e
    if isinstance(e, RatExpr) and e.is_laurent():
        return RatExpr.of(e.num.map_indices(lambda i: i + s))
    return e.map_indices(lambda i: i + s)


def reverse(e):
    """Index reversal ``n -> -n`` as a formal automorphism."""
    if e.mode == JET:
        raise ModeError("reversal is only defined on lattice expressions")
    return e.map_indices(lambda i: -i)


def canonical_form(density: Poly) -> Poly:
    """Normal form of ``density`` modulo the image of ``Lambda - 1``.

    Each term is shifted so that its smallest index is 0.  For Laurent
    densities this is a complete invariant of the class.
    """
    if isinstance(density, LocalFunctional):
        if density.logs:
            raise CanonicalFormError("log terms must be handled separately")
        density = density.density
    if isinstance(density, RatExpr):
        if not density.is_laurent():
            raise CanonicalFormError("density has a non-monomial denominator; expand it first")
        density = density.num
    if density.mode == JET:
        raise ModeError("canonical_form works modulo Lambda - 1 (lattice mode)")
    out: dict = {}
    for (e, o), c in density.terms.items():
        idx = [v[1] for v, _k in e if v[1] is not None] + [g[1] for g in o]
        s = -min(idx) if idx else 0
        if s:
            ne = tuple(((n, i if i is None else i + s), k) for (n, i), k in e)
            no = tuple((a, i + s) for a, i in o)
            key = (ne, no)
        else:
            key = (e, o)
        n = out.get(key, 0) + c
        if n:
            out[key] = n
        else:
            del out[key]
    return Poly(out, density.mode)


def is_exact_difference(density) -> bool:
    return canonical_form(density).is_zero()


def difference(e, s: int = 1):
    """``(Lambda^s - 1) e``."""
    return shift(e, s) - e


# -- jet space ---------------------------------------------------------------------

def _base_vars(e: Poly):
    """Independent even variables of ``e``: generators are replaced by their
    base variable at the same index."""
    out = set()
    for v in e.even_vars():
        if v[1] is None:
            continue
        b = generator_base(v[0])
        out.add((b, v[1]) if b else v)
    return out


def total_derivative(e):
    """The total x-derivative on the jet space (Leibniz, chain rule through
    generators, odd jets raised as well)."""
    if isinstance(e, RatExpr):
        dn, dd = total_derivative(e.num), total_derivative(e.den)
        if dd.is_zero():
            return RatExpr(dn, e.den)
        return RatExpr(dn * e.den - e.num * dd, e.den * e.den)
    if e.mode == LATTICE:
        raise ModeError("total x-derivative needs jet-mode input")
    result = Poly({}, e.mode)
    for v in _base_vars(e):
        for g in e.even_vars():
            if g[1] == v[1] and g[1] and generator_base(g[0]) == v[0]:
                raise ModeError(f"generator {g[0]} only supported at jet order 0")
        d = e.partial(v)
        if d:
            result = result + d * Poly.var(v[0], v[1] + 1, JET)
    out: dict = {}
    for (ev, o), c in e.terms.items():
        for i, (a, s) in enumerate(o):
            sign, no = _sort_odd(o[:i] + ((a, s + 1),) + o[i + 1:])
            if sign:
                key = (ev, no)
                out[key] = out.get(key, 0) + sign * c
    if out:
        result = result + Poly._from_raw(out, e.mode)
    return result


def total_derivative_n(e, n: int):
    for _ in range(n):
        e = total_derivative(e)
    return e


def jet_order(e) -> int:
    if isinstance(e, RatExpr):
        return max(jet_order(e.num), jet_order(e.den))
    idx = e.indices()
    return max(idx) if idx else 0


# -- local functionals ------------------------------------------------------------

@dataclass(frozen=True)
class LocalFunctional:
    """``sum_n density(n)`` (lattice) or ``int density dx`` (jet), plus
    optional additive ``c * log(arg)`` terms."""

    density: Poly
    mode: str = LATTICE
    logs: tuple = field(default=())

    def __post_init__(self):
        if self.density.mode not in (None, self.mode):
            raise ModeError(f"density mode {self.density.mode} does not match {self.mode}")

    @classmethod
    def log(cls, coeff, arg: Poly, mode: str = LATTICE) -> "LocalFunctional":
        return cls(Poly.const(0, mode), mode, ((Fraction(coeff), arg),))

    def __add__(self, other: "LocalFunctional") -> "LocalFunctional":
        return LocalFunctional(self.density + other.density, self.mode, self.logs + other.logs)


def _as_functional(f, mode=None) -> LocalFunctional:
    if isinstance(f, LocalFunctional):
        return f
    return LocalFunctional(f, mode or f.mode or LATTICE)


def partial_with_logs(f: LocalFunctional, v):
    """Partial derivative of the full density (log terms included)."""
    d = f.density.partial(v)
    extra = None
    for c, arg in f.logs:
        da = arg.partial(v)
        if da.is_zero():
            continue
        term = RatExpr(da * c, arg)
        extra = term if extra is None else extra + term
    if extra is None:
        return d
    total = extra + d
    return total.num if total.is_laurent() else total


def variational_derivative(f, x):
    """Euler operator of a local functional.

    ``x`` is an even variable name (``'Q'``) or an odd generator index
    (``1`` for theta_1).  Lattice: sum_l Lambda^{-l} dh/dx^{(l)}.
    Jet: sum_s (-D)^s dh/dx^{(s)}.
    """
    f = _as_functional(f)
    lattice = f.mode == LATTICE
    if isinstance(x, int):
        if f.logs:
            raise ValueError("log terms carry no odd variables")
        indices = sorted({g[1] for g in f.density.odd_gens() if g[0] == x})
        pieces = [(s, f.density.odd_partial((x, s))) for s in indices]
    else:
        indices = set()
        for p in [f.density] + [a for _c, a in f.logs]:
            indices |= {v[1] for v in _base_vars(p) if v[0] == x}
        pieces = [(s, partial_with_logs(f, (x, s))) for s in sorted(indices)]
    result = Poly.const(0, f.mode)
    for s, d in pieces:
        if lattice:
            term = shift(d, -s)
        else:
            term = total_derivative_n(d, s)
            if s % 2:
                term = -term
        result = result + term
    if isinstance(result, RatExpr) and result.is_laurent():
        return result.num
    return result


def euler_vanishes(e: Poly) -> bool:
    """True when every variational derivative of the jet density ``e`` is 0."""
    f = LocalFunctional(e, JET)
    names = {v[0] for v in _base_vars(e)}
    alphas = {g[0] for g in e.odd_gens()}
    return all(not variational_derivative(f, n) for n in names) and all(
        not variational_derivative(f, a) for a in alphas)


# -- integration of exact derivatives ---------------------------------------------

def _split_term(key, v):
    """Split a monomial into (x-dependent exponents, rest) for variable v."""
    even, odd = key
    name, idx = v
    dep = {"pow": 0, "exp": 0, "log": 0}
    rest = []
    for w, k in even:
        if w == v:
            dep["pow"] = k
        elif w[1] == idx and generator_base(w[0]) == name:
            dep["exp" if w[0] == "w" else "log"] = k
        else:
            rest.append((w, k))
    return dep, (tuple(rest), odd)


def _antiderivative_term(a: int, b: int, d: int, v, mode) -> Poly:
    """Antiderivative of x^a * exp(x)^b * log(x)^d in x = v."""
    x = Poly.var(v[0], v[1], mode)
    if b and d:
        raise NotExactError("mixed exp/log antiderivative unsupported")
    if b:
        if a < 0:
            raise NotExactError("antiderivative of x^a e^{bx} with a < 0 is not elementary")
        if v[0] != "v2":
            raise NotExactError(f"no exponential generator for {v[0]}")
        w = Poly.var("w", v[1], mode) ** b
        total = Poly.const(0, mode)
        for i in range(a + 1):
            c = Fraction((-1) ** i * factorial(a), factorial(a - i)) / Fraction(b) ** (i + 1)
            total = total + x ** (a - i) * c
        return w * total
    if a == -1:
        if v[1] != 0:
            raise NotExactError("logarithm of a higher jet variable")
        return Poly.var(f"log({v[0]})", 0, mode) ** (d + 1) * Fraction(1, d + 1)
    if d == 0:
        return x ** (a + 1) * Fraction(1, a + 1)
    lg = Poly.var(f"log({v[0]})", v[1], mode)
    return x ** (a + 1) * lg**d * Fraction(1, a + 1) - _antiderivative_term(a, 0, d - 1, v, mode) * Fraction(d, a + 1)


def antiderivative(e: Poly, v) -> Poly:
    """Partial antiderivative of ``e`` in the variable ``v``."""
    out = Poly.const(0, e.mode)
    for key, c in e.terms.items():
        dep, rest = _split_term(key, v)
        prim = _antiderivative_term(dep["pow"], dep["exp"], dep["log"], v, e.mode)
        out = out + prim * Poly({rest: c}, e.mode)
    return out


def integrate_total_derivative(e: Poly) -> Poly:
    """Primitive ``F`` with ``D F = e`` and no constant term.

    Works by peeling the highest jet order: an exact derivative is linear in
    its top-order jets, and the coefficient of ``x^(n)`` is the partial of the
    primitive in ``x^(n-1)``.  Raises :class:`NotExactError` otherwise.
    """
    if isinstance(e, RatExpr):
        if not e.is_laurent():
            raise NotExactError("fraction-valued integrands are not supported")
        e = e.num
    if e.mode == LATTICE:
        raise ModeError("integration needs jet-mode input")
    if e.odd_gens():
        raise NotExactError("odd integrands are not supported")
    if not euler_vanishes(e):
        raise NotExactError(f"not a total derivative: {e}")
    F = Poly.const(0, JET)
    r = e
    while r:
        n = jet_order(r)
        if n == 0:
            raise NotExactError(f"leftover of order 0: {r}")
        for v in sorted(x for x in _base_vars(r) if x[1] == n):
            coeff = r._direct_partial(v)
            if any(w[1] == n for w in _base_vars(coeff)):
                raise NotExactError(f"{v} enters nonlinearly")
            G = antiderivative(coeff, (v[0], n - 1))
            F = F + G
            r = r - total_derivative(G)
        if any(x[1] == n for x in _base_vars(r)):
            raise NotExactError("top-order jets survive peeling")
    if total_derivative(F) != e:
        raise NotExactError("integration check failed")
    return F


# -- numeric ----------------------------------------------------------------------

def eval_numeric(e, assignment) -> float:
    return e.evaluate(assignment)


def binomial(n: int, k: int) -> int:
    return comb(n, k)
