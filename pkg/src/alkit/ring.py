"""Exact coefficient ring for the whole package.

A :class:`Poly` is a finite sum of terms ``c * m * o`` where ``c`` is a
:class:`fractions.Fraction`, ``m`` a Laurent monomial in indexed even
variables and ``o`` an ordered product of distinct odd (Grassmann) generators.

Every variable carries an integer index.  In *lattice* mode the index is a
shift, ``Q[1] = Q^+``; in *jet* mode it is the order of x-derivative,
``u2[2] = u2_xx``.  Variables created with :func:`param` have index ``None``
and are inert under shifts and derivations (formal parameters such as the
pencil coefficients).

Two names are treated as transcendental generators tied to a base variable:
``w`` stands for ``exp(v2)`` and ``log(X)`` for the logarithm of ``X``.  They
stay algebraically independent, but partial derivatives with respect to the
base variable apply the chain rule.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping

LATTICE = "lattice"
JET = "jet"

Var = tuple  # (name, index or None)
OddGen = tuple  # (alpha, index)


class ModeError(ValueError):
    """Raised when lattice and jet expressions are mixed, or an operation is
    used in the wrong mode."""


def _vkey(v: Var):
    return (v[0], -(10**9) if v[1] is None else v[1])


def _merge_mode(a, b):
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise ModeError(f"cannot combine {a} and {b} expressions")


def _sort_odd(gens: Iterable[OddGen]):
    """Sort odd factors, returning ``(sign, tuple)`` or ``(0, None)`` if a
    generator repeats."""
    gens = list(gens)
    if len(set(gens)) != len(gens):
        return 0, None
    # insertion sort counting transpositions; products are short
    sign = 1
    for i in range(1, len(gens)):
        j = i
        while j > 0 and gens[j - 1] > gens[j]:
            gens[j - 1], gens[j] = gens[j], gens[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(gens)


def _mul_even(e1, e2):
    if not e1:
        return e2
    if not e2:
        return e1
    d = dict(e1)
    for v, k in e2:
        n = d.get(v, 0) + k
        if n:
            d[v] = n
        else:
            del d[v]
    return tuple(sorted(d.items(), key=lambda it: _vkey(it[0])))


def _mul_odd(o1, o2):
    if not o1:
        return 1, o2
    if not o2:
        return 1, o1
    if set(o1) & set(o2):
        return 0, None
    inversions = 0
    for a in o1:
        for b in o2:
            if a > b:
                inversions += 1
    merged = tuple(sorted(o1 + o2))
    return (-1 if inversions % 2 else 1), merged


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"exact coefficient required, got {type(c).__name__}")


# -- transcendental generators -------------------------------------------------

def generator_base(name: str) -> str | None:
    if name == "w":
        return "v2"
    if name.startswith("log(") and name.endswith(")"):
        return name[4:-1]
    return None


def _generator_derivative(name: str, idx, mode) -> "Poly":
    if name == "w":
        return Poly.var("w", idx, mode)
    base = generator_base(name)
    return Poly.var(base, idx, mode) ** -1


class Poly:
    """Normalized element of the coefficient ring (the package's RingExpr)."""

    __slots__ = ("terms", "mode", "_hash")

    def __init__(self, terms: Mapping | None = None, mode: str | None = None):
        self.terms = dict(terms) if terms else {}
        self.mode = mode
        self._hash = None

    # -- constructors ------------------------------------------------------
    @classmethod
    def const(cls, c, mode: str | None = None) -> "Poly":
        c = _as_fraction(c)
        return cls({((), ()): c} if c else {}, mode)

    @classmethod
    def var(cls, name: str, idx: int = 0, mode: str = LATTICE) -> "Poly":
        return cls({((((name, idx), 1),), ()): Fraction(1)}, mode)

    @classmethod
    def odd(cls, alpha: int, idx: int = 0, mode: str = LATTICE) -> "Poly":
        return cls({((), ((alpha, idx),)): Fraction(1)}, mode)

    @classmethod
    def param(cls, name: str) -> "Poly":
        return cls({((((name, None), 1),), ()): Fraction(1)}, None)

    @staticmethod
    def _from_raw(raw: dict, mode) -> "Poly":
        return Poly({k: v for k, v in raw.items() if v}, mode)

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly.const(other)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, (Poly, int, Fraction)):
            return NotImplemented
        other = self._coerce(other)
        mode = _merge_mode(self.mode, other.mode)
        out = dict(self.terms)
        for k, c in other.terms.items():
            n = out.get(k, 0) + c
            if n:
                out[k] = n
            else:
                out.pop(k, None)
        return Poly(out, mode)

    __radd__ = __add__

    def __neg__(self):
        return Poly({k: -c for k, c in self.terms.items()}, self.mode)

    def __sub__(self, other):
        if not isinstance(other, (Poly, int, Fraction)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if not c:
                return Poly({}, self.mode)
            return Poly({k: v * c for k, v in self.terms.items()}, self.mode)
        if not isinstance(other, Poly):
            return NotImplemented
        mode = _merge_mode(self.mode, other.mode)
        out: dict = {}
        for (e1, o1), c1 in self.terms.items():
            for (e2, o2), c2 in other.terms.items():
                sign, odd = _mul_odd(o1, o2)
                if not sign:
                    continue
                key = (_mul_even(e1, e2), odd)
                n = out.get(key, 0) + (c1 * c2 if sign > 0 else -c1 * c2)
                if n:
                    out[key] = n
                else:
                    del out[key]
        return Poly(out, mode)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = Poly.const(1, self.mode)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> "Poly":
        """Inverse of a single even Laurent monomial."""
        if len(self.terms) != 1:
            raise ZeroDivisionError("only monomials are invertible in the Laurent ring")
        (even, odd), c = next(iter(self.terms.items()))
        if odd:
            raise ZeroDivisionError("odd elements are nilpotent")
        return Poly({(tuple((v, -k) for v, k in even), ()): 1 / c}, self.mode)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / _as_fraction(other))
        if isinstance(other, Poly):
            if other.is_monomial():
                return self * other.inverse()
            raise TypeError("division by a non-monomial needs RatExpr")
        return NotImplemented

    # -- comparison ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1 and not next(iter(self.terms))[1]

    def is_constant(self) -> bool:
        return all(not e and not o for e, o in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        return self.terms.get(((), ()), Fraction(0))

    # -- structure -------------------------------------------------------------
    def __len__(self):
        return len(self.terms)

    def even_vars(self) -> set:
        return {v for (e, _), _c in self.terms.items() for v, _k in e}

    def odd_gens(self) -> set:
        return {g for (_e, o) in self.terms for g in o}

    def odd_degrees(self) -> set:
        return {len(o) for (_e, o) in self.terms}

    def indices(self) -> list:
        """All variable/odd indices (parameters excluded)."""
        out = []
        for e, o in self.terms:
            out.extend(v[1] for v, _k in e if v[1] is not None)
            out.extend(g[1] for g in o)
        return out

    def with_mode(self, mode) -> "Poly":
        return Poly(self.terms, mode)

    def map_indices(self, f: Callable[[int], int], mode=None) -> "Poly":
        """Apply ``f`` to every index; odd factors are re-sorted with sign."""
        out: dict = {}
        for (e, o), c in self.terms.items():
            ne = {}
            for (name, idx), k in e:
                nv = (name, idx if idx is None else f(idx))
                ne[nv] = ne.get(nv, 0) + k
            ne = tuple(sorted(((v, k) for v, k in ne.items() if k), key=lambda it: _vkey(it[0])))
            sign, no = _sort_odd((a, f(i)) for a, i in o)
            if not sign:
                continue
            key = (ne, no)
            n = out.get(key, 0) + sign * c
            if n:
                out[key] = n
            else:
                out.pop(key, None)
        return Poly(out, self.mode if mode is None else mode)

    def rename(self, mapping: Mapping[str, str]) -> "Poly":
        out = {}
        for (e, o), c in self.terms.items():
            ne = tuple(sorted((((mapping.get(n, n), i), k) for (n, i), k in e), key=lambda it: _vkey(it[0])))
            out[(ne, o)] = out.get((ne, o), 0) + c
        return Poly._from_raw(out, self.mode)

    # -- calculus ---------------------------------------------------------------
    def _direct_partial(self, v: Var) -> "Poly":
        out: dict = {}
        for (e, o), c in self.terms.items():
            for i, (w, k) in enumerate(e):
                if w == v:
                    ne = e[:i] + ((w, k - 1),) + e[i + 1:] if k != 1 else e[:i] + e[i + 1:]
                    key = (ne, o)
                    out[key] = out.get(key, 0) + c * k
                    break
        return Poly._from_raw(out, self.mode)

    def partial(self, v: Var) -> "Poly":
        """Partial derivative in the even variable ``v = (name, idx)``,
        including the chain rule through dependent generators."""
        result = self._direct_partial(v)
        name, idx = v
        for g in self.even_vars():
            if g[1] == idx and generator_base(g[0]) == name:
                result = result + self._direct_partial(g) * _generator_derivative(g[0], idx, self.mode)
        return result

    def odd_partial(self, g: OddGen) -> "Poly":
        """Left derivative in the odd generator ``g``: move it to the front,
        then drop it."""
        out: dict = {}
        for (e, o), c in self.terms.items():
            if g in o:
                pos = o.index(g)
                key = (e, o[:pos] + o[pos + 1:])
                out[key] = out.get(key, 0) + (c if pos % 2 == 0 else -c)
        return Poly._from_raw(out, self.mode)

    def substitute(self, mapping: Mapping[Var, "Poly"]) -> "Poly":
        """Replace even variables by ring elements (negative powers require
        monomial images)."""
        result = Poly({}, self.mode)
        cache: dict = {}
        for (e, o), c in self.terms.items():
            term = Poly({((), o): c}, self.mode)
            for v, k in e:
                if v in mapping:
                    key = (v, k)
                    if key not in cache:
                        cache[key] = mapping[v] ** k
                    term = term * cache[key]
                else:
                    term = term * Poly({(((v, k),), ()): Fraction(1)}, self.mode)
            result = result + term
        return result

    def evaluate(self, assignment: Mapping) -> float:
        """Float value; ``assignment`` maps ``(name, idx)`` (or bare names for
        index 0) to numbers."""
        total = 0.0
        for (e, o), c in self.terms.items():
            if o:
                raise ValueError("cannot evaluate an expression with odd generators")
            val = float(c)
            for v, k in e:
                if v in assignment:
                    x = assignment[v]
                elif v[1] in (0, None) and v[0] in assignment:
                    x = assignment[v[0]]
                else:
                    raise KeyError(f"unassigned variable {_fmt_var(v, self.mode)}")
                if x == 0 and k < 0:
                    raise ZeroDivisionError(f"{_fmt_var(v, self.mode)} = 0 in a denominator")
                val *= float(x) ** k
            total += val
        return total

    # -- printing ----------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda it: (len(it[0][1]), [(_vkey(v), k) for v, k in it[0][0]], it[0][1]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (e, o), c in self.sorted_terms():
            factors = [_fmt_var(v, self.mode) + (f"^{k}" if k != 1 else "") for v, k in e]
            factors += [_fmt_var((f"th{a}", i), self.mode) for a, i in o]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self})"


def _fmt_var(v: Var, mode) -> str:
    name, idx = v
    if idx is None or idx == 0:
        return name
    if mode == JET:
        return f"{name}_{'x' * idx}" if idx <= 3 else f"{name}^({idx})"
    if abs(idx) <= 2:
        return name + ("+" if idx > 0 else "-") * abs(idx)
    return f"{name}[{idx}]"


def lattice_vars(*names: str):
    """Shortcut: ``P, Q = lattice_vars('P', 'Q')``."""
    return tuple(Poly.var(n, 0, LATTICE) for n in names)


ZERO = Poly.const(0)
ONE = Poly.const(1)
