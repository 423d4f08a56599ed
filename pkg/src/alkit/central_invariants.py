"""Continuum expansion of the lattice operators and central invariants of the
bihamiltonian pairs."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .calculus import total_derivative, total_derivative_n
from .lambda_ops import MatrixLambdaOp
from .ring import JET, Poly
from .trihamiltonian import build_operator

FIELD_TO_JET = {"P": "u1", "Q": "u2"}


def u(alpha: int, order: int = 0) -> Poly:
    return Poly.var(f"u{alpha}", order, JET)


# -- differential operators ---------------------------------------------------------

class DiffOp:
    """sum_k c_k d_x^k with jet-mode coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {k: c for k, c in (coeffs or {}).items() if not _as_jet(c).is_zero()}
        self.coeffs = {k: _as_jet(c) for k, c in self.coeffs.items()}

    @classmethod
    def d(cls, k: int = 1) -> "DiffOp":
        return cls({k: Poly.const(1, JET)})

    @classmethod
    def mul(cls, f) -> "DiffOp":
        return cls({0: _as_jet(f)})

    @classmethod
    def zero(cls) -> "DiffOp":
        return cls({})

    def __add__(self, other):
        other = _as_op(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return DiffOp(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffOp({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-_as_op(other))

    def __rsub__(self, other):
        return _as_op(other) - self

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)):
            return DiffOp({k: v * c for k, v in self.coeffs.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        """Composition by the Leibniz rule."""
        other = _as_op(other)
        out: dict = {}
        for a, f in self.coeffs.items():
            for b, g in other.coeffs.items():
                for i in range(a + 1):
                    term = f * total_derivative_n(g, i) * comb(a, i)
                    k = a - i + b
                    out[k] = out[k] + term if k in out else term
        return DiffOp(out)

    def __rmatmul__(self, other):
        return _as_op(other) @ self

    def adjoint(self) -> "DiffOp":
        """(f d^k)* = (-1)^k d^k o f."""
        out = DiffOp.zero()
        for k, f in self.coeffs.items():
            out = out + (DiffOp.d(k) @ DiffOp.mul(f)) * (-1) ** k
        return out

    def coeff(self, k: int) -> Poly:
        return self.coeffs.get(k, Poly.const(0, JET))

    def order(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            other = _as_op(other)
        return self.coeffs == other.coeffs

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({self.coeffs[k]})d^{k}" for k in sorted(self.coeffs, reverse=True))

    __repr__ = __str__


def _as_jet(c) -> Poly:
    if isinstance(c, Poly):
        return c if c.mode == JET else c.with_mode(JET) if c.mode is None else c
    return Poly.const(c, JET)


def _as_op(x) -> DiffOp:
    return x if isinstance(x, DiffOp) else DiffOp.mul(x)


# -- epsilon expansion ------------------------------------------------------------------

def _trunc_mul(a: dict, b: dict, top: int) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            if i + j <= top:
                out[i + j] = out[i + j] + x * y if i + j in out else x * y
    return out


def _var_series(name: str, m: int, top: int) -> dict:
    """x^{(m)} -> sum_r eps^r m^r x^{[r]} / r!."""
    jet = FIELD_TO_JET.get(name, name)
    out = {0: Poly.var(jet, 0, JET)}
    if m:
        for r in range(1, top + 1):
            out[r] = Poly.var(jet, r, JET) * Fraction(m**r, factorial(r))
    return out


def _power_series(name: str, m: int, e: int, top: int) -> dict:
    """(x^{(m)})^e expanded in eps, e of any sign."""
    base = _var_series(name, m, top)
    x0 = base[0]
    delta = {r: c for r, c in base.items() if r > 0}
    out = {0: x0**e}
    dpow = {0: Poly.const(1, JET)}
    for n in range(1, top + 1):
        dpow = _trunc_mul(dpow, delta, top)
        if not dpow:
            break
        binom = Fraction(1)
        for i in range(n):
            binom *= Fraction(e - i, i + 1)
        if binom == 0:
            break
        xpow = x0 ** (e - n)
        for r, c in dpow.items():
            term = c * xpow * binom
            out[r] = out[r] + term if r in out else term
    return out


def eps_series(coeff: Poly, top: int) -> dict:
    """Continuum expansion of a lattice coefficient, up to eps^top."""
    total: dict = {}
    for (even, odd), c in coeff.terms.items():
        if odd:
            raise ValueError("operator coefficients carry no odd variables")
        term = {0: Poly.const(c, JET)}
        for (name, m), e in even:
            term = _trunc_mul(term, _power_series(name, m, e, top), top)
        for r, v in term.items():
            total[r] = total[r] + v if r in total else v
    return total


@dataclass
class EpsOperator:
    """Coefficients Q_{s,k} (eps-degree s after the 1/eps rescaling, d_x-order k)."""

    order: int
    coeffs: dict = field(default_factory=dict)

    def entry(self, s: int, k: int, i: int, j: int) -> Poly:
        m = self.coeffs.get((s, k))
        return m[i][j] if m is not None else Poly.const(0, JET)

    def block(self, s: int) -> list:
        """The eps^s part as a 2x2 matrix of DiffOps."""
        return [[DiffOp({k: self.entry(s, k, i, j) for (ss, k) in self.coeffs if ss == s})
                 for j in range(2)] for i in range(2)]

    def top_symbol(self, s: int) -> list:
        """Coefficient matrix of d_x^{s+1} at eps^s (depends on u only)."""
        return [[self.entry(s, s + 1, i, j) for j in range(2)] for i in range(2)]


def eps_expand(op: MatrixLambdaOp, order: int = 2) -> EpsOperator:
    """Substitute x^{(m)} and Lambda^j by their Taylor series, rescale by 1/eps
    and keep eps^0..eps^order."""
    top = order + 1
    raw: dict = {}
    for i in range(2):
        for j in range(2):
            entry = op[i, j]
            if not entry.is_finite():
                raise ValueError("only finite operators can be expanded")
            for jj, c in entry.coeffs.items():
                cs = eps_series(c, top)
                for rc, cv in cs.items():
                    for r in range(top - rc + 1):
                        if jj == 0 and r > 0:
                            break
                        e = rc + r
                        val = cv * Fraction(jj**r, factorial(r))
                        if val.is_zero():
                            continue
                        key = (e, r)
                        mat = raw.setdefault(key, [[Poly.const(0, JET)] * 2 for _ in range(2)])
                        mat[i][j] = mat[i][j] + val
    out = EpsOperator(order)
    for (e, r), mat in raw.items():
        if all(x.is_zero() for row in mat for x in row):
            continue
        if e == 0:
            raise ValueError("eps^0 part of the lattice operator does not vanish")
        out.coeffs[(e - 1, r)] = mat
    return out


@lru_cache(maxsize=None)
def expanded(op_id: int, order: int = 2) -> EpsOperator:
    return eps_expand(build_operator(op_id), order)


# -- reference data for P1 and P2 ------------------------------------------------------

def printed_blocks() -> dict:
    """The eps^0..eps^2 blocks of P1 and P2 entered by hand from the A..F blocks."""
    d = DiffOp.d
    m = DiffOp.mul
    u1, u2 = u(1), u(2)
    h = Fraction(1, 2)
    A = m(u2 * h) @ d(2)
    B = (m(u(2, 3) * Fraction(-1, 6)) + m(u(2, 2) * (-h)) @ d(1)
         + m(u(2, 1) * (-h)) @ d(2) + m(u2 * Fraction(-1, 3)) @ d(3))
    C = m(u2 * Fraction(-1, 6)) @ d(3)
    D = m(u(1, 2) * u2 * (-h)) - m(u(1, 1) * u2) @ d(1) - m(u1 * u2 * h) @ d(2)
    E = (m(u(1, 3) * u2 * Fraction(1, 6)) + m(u(1, 2) * u2 * h) @ d(1)
         + m(u(1, 1) * u2 * h) @ d(2) + m(u1 * u2 * Fraction(1, 6)) @ d(3))
    F = (m(u2 * u(2, 3) * Fraction(1, 3)) + m(u2 * u(2, 2)) @ d(1)
         + m(u2 * u(2, 1)) @ d(2) + m(u2 * u2 * Fraction(1, 3)) @ d(3))
    Z = DiffOp.zero()
    p10 = [[-(d(1) @ m(u2)) - m(u2) @ d(1), -(d(1) @ m(u2))], [-(m(u2) @ d(1)), Z]]
    p20 = [[Z, m(u1) @ d(1) @ m(u2)], [m(u2) @ d(1) @ m(u1), m(u2 * 2) @ d(1) @ m(u2)]]
    p11 = [[m(u(2, 2) * (-h)) - m(u(2, 1)) @ d(1), -A.adjoint()], [A, Z]]
    p12 = [[B, -C.adjoint()], [C, Z]]
    p21 = [[Z, -D.adjoint()], [D, Z]]
    p22 = [[Z, -E.adjoint()], [E, F]]
    return {(1, 0): p10, (1, 1): p11, (1, 2): p12, (2, 0): p20, (2, 1): p21, (2, 2): p22}


def compare_printed_blocks() -> list[tuple[str, bool]]:
    printed = printed_blocks()
    out = []
    for (op_id, s), mat in sorted(printed.items()):
        got = expanded(op_id, 2).block(s)
        ok = all(got[i][j] == mat[i][j] for i in range(2) for j in range(2))
        out.append((f"P{op_id} eps^{s}", ok))
    return out


def homogeneity_defects(eo: EpsOperator) -> list:
    """(s, k, i, j) entries that are not of differential degree s + 1 - k."""
    bad = []
    for (s, k), mat in eo.coeffs.items():
        for i in range(2):
            for j in range(2):
                for (even, _o), _c in mat[i][j].terms.items():
                    deg = sum(idx * e for (_n, idx), e in even)
                    if deg != s + 1 - k:
                        bad.append((s, k, i, j))
                        break
    return bad


# -- hydrodynamic data and canonical coordinates ---------------------------------------

@dataclass
class HydroPair:
    ids: tuple
    g1: list
    g2: list


def hydrodynamic_leading_pair(id_a: int, id_b: int) -> HydroPair:
    ea, eb = expanded(id_a), expanded(id_b)
    return HydroPair((id_a, id_b), ea.top_symbol(0), eb.top_symbol(0))


def characteristic_coefficients(pair: HydroPair) -> tuple[Poly, Poly, Poly]:
    """det(g2 - mu g1) = a mu^2 + b mu + c."""
    (p, q), (r, s) = pair.g1
    (P_, Q_), (R_, S_) = pair.g2
    a = p * s - q * r
    b = -(p * S_ + P_ * s - q * R_ - Q_ * r)
    c = P_ * S_ - Q_ * R_
    return a, b, c


def exact_eval(e: Poly, point) -> Fraction:
    total = Fraction(0)
    for (even, _o), c in e.terms.items():
        val = Fraction(c)
        for (name, idx), k in even:
            if idx:
                raise ValueError("exact evaluation only at jet order 0")
            val *= Fraction(point[name]) ** k
        total += val
    return total


def _eval(e: Poly, point, exact: bool):
    if exact:
        return exact_eval(e, point)
    return e.evaluate({(n, 0): float(v) for n, v in point.items()})


def _sqrt(x, exact: bool):
    if exact and isinstance(x, Fraction) and x >= 0:
        rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
        if rn * rn == x.numerator and rd * rd == x.denominator:
            return Fraction(rn, rd)
    if x < 0:
        raise ValueError("complex canonical coordinates")
    return math.sqrt(x)


def lambda_closed_form(u1, u2):
    """Canonical coordinates of (P1, P2): u1 - 2u2 +- 2 sqrt(u2^2 - u1 u2)."""
    exact = isinstance(u1, (int, Fraction)) and isinstance(u2, (int, Fraction))
    r = _sqrt(Fraction(u2) ** 2 - Fraction(u1) * Fraction(u2) if exact else u2 * u2 - u1 * u2, exact)
    return (u1 - 2 * u2 + 2 * r, u1 - 2 * u2 - 2 * r)


def canonical_coordinates(pair: HydroPair, point, exact: bool = False):
    """Roots of det(g2 - mu g1) at ``point`` (dict u1, u2), larger root first."""
    a, b, c = (_eval(x, point, exact) for x in characteristic_coefficients(pair))
    if a == 0:
        raise ValueError("degenerate g1 at the sample point")
    disc = b * b - 4 * a * c
    if disc <= 0:
        raise ValueError("complex or coincident canonical coordinates")
    r = _sqrt(disc, exact)
    roots = sorted(((-b + r) / (2 * a), (-b - r) / (2 * a)), reverse=True)
    return tuple(roots)


def _mat_eval(m, point, exact):
    return [[_eval(m[i][j], point, exact) for j in range(2)] for i in range(2)]


def _tensor(J, M):
    """J M J^T for 2x2 nested lists."""
    JM = [[sum(J[i][k] * M[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    return [[sum(JM[i][k] * J[j][k] for k in range(2)) for j in range(2)] for i in range(2)]


def _null_vector(M):
    """A null vector of a singular 2x2 matrix."""
    (a, b), (c, d) = M
    v = (-b, a) if abs(a) + abs(b) >= abs(c) + abs(d) else (-d, c)
    n = math.hypot(float(v[0]), float(v[1]))
    return (float(v[0]) / n, float(v[1]) / n)


@dataclass
class InvariantResult:
    pair: tuple
    mu: tuple              # canonical coordinates of this pair
    f: tuple
    c: tuple
    lam12: tuple           # canonical coordinates of (P1, P2), matched to mu
    condition: float = 1.0


def _jacobian(pair: HydroPair, mu, point, exact):
    a, b, c = characteristic_coefficients(pair)
    rows = []
    for m in mu:
        denom = 2 * _eval(a, point, exact) * m + _eval(b, point, exact)
        row = []
        for name in ("u1", "u2"):
            v = (name, 0)
            num = (_eval(a.partial(v), point, exact) * m * m + _eval(b.partial(v), point, exact) * m
                   + _eval(c.partial(v), point, exact))
            row.append(-num / denom)
        rows.append(row)
    return rows


def central_invariants_at(id_a: int, id_b: int, point, exact: bool | None = None) -> InvariantResult:
    """c_i of the pair (P_a, P_b) at ``point``; first entry of the pair plays Q_1."""
    if exact is None:
        exact = all(isinstance(v, (int, Fraction)) for v in point.values())
    pair = hydrodynamic_leading_pair(id_a, id_b)
    mu = canonical_coordinates(pair, point, exact)
    J = _jacobian(pair, mu, point, exact)
    ea, eb = expanded(id_a), expanded(id_b)
    g1 = _tensor(J, _mat_eval(pair.g1, point, exact))
    f = (g1[0][0], g1[1][1])
    if f[0] == 0 or f[1] == 0:
        raise ValueError("f^i vanishes at the sample point")
    scale = max(abs(float(f[0])), abs(float(f[1])))
    cond = abs(float(g1[0][1])) / scale
    q1_12 = _tensor(J, _mat_eval(ea.top_symbol(1), point, exact))
    q2_12 = _tensor(J, _mat_eval(eb.top_symbol(1), point, exact))
    q1_23 = _tensor(J, _mat_eval(ea.top_symbol(2), point, exact))
    q2_23 = _tensor(J, _mat_eval(eb.top_symbol(2), point, exact))
    cs = []
    for i in range(2):
        total = q2_23[i][i] - mu[i] * q1_23[i][i]
        for k in range(2):
            if k != i:
                num = q2_12[k][i] - mu[i] * q1_12[k][i]
                total += num * num / (f[k] * (mu[k] - mu[i]))
        cs.append(total / (3 * f[i] * f[i]))
    lam = _match_labels(pair, mu, point, exact)
    return InvariantResult((id_a, id_b), tuple(mu), f, tuple(cs), lam, cond)


def _match_labels(pair: HydroPair, mu, point, exact):
    """For each root of this pair, the (P1, P2) coordinate sharing its eigen-direction."""
    base = hydrodynamic_leading_pair(1, 2)
    lam = canonical_coordinates(base, point, exact)
    g1b, g2b = _mat_eval(base.g1, point, exact), _mat_eval(base.g2, point, exact)
    ga, gb = _mat_eval(pair.g1, point, exact), _mat_eval(pair.g2, point, exact)
    vb = [_null_vector([[g2b[i][j] - l * g1b[i][j] for j in range(2)] for i in range(2)]) for l in lam]
    out = []
    for m in mu:
        v = _null_vector([[gb[i][j] - m * ga[i][j] for j in range(2)] for i in range(2)])
        dots = [abs(v[0] * w[0] + v[1] * w[1]) for w in vb]
        out.append(lam[dots.index(max(dots))])
    return tuple(out)


# -- the table ------------------------------------------------------------------------

PAIRS = ((1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2))
READINGS = ("own", "closed")


def needs_sqrt(pair: tuple) -> bool:
    return 1 in pair and 3 in pair


def table_value(pair: tuple, lam):
    """Reference central invariant as a function of its coordinate argument."""
    sq = lambda x: _sqrt(x, isinstance(x, Fraction))
    return {
        (1, 2): lambda l: Fraction(1, 24),
        (2, 1): lambda l: -1 / (24 * l),
        (1, 3): lambda l: -1 / (48 * sq(l)),
        (3, 1): lambda l: -1 / (48 * sq(l)),
        (2, 3): lambda l: 1 / (24 * l),
        (3, 2): lambda l: Fraction(-1, 24),
    }[pair](lam)


def table_argument(res: InvariantResult, i: int, reading: str = "own"):
    """The coordinate fed to the table for root i.

    ``own``: the pair's own canonical coordinate; for the square-root rows
    (whose own roots are negative) its negative.  ``closed``: the reference
    closed-form coordinate of (P1, P2), which is minus the root of the
    characteristic equation.
    """
    if reading == "own":
        return -res.mu[i] if needs_sqrt(res.pair) else res.mu[i]
    if reading == "closed":
        return -res.lam12[i]
    raise ValueError(reading)


def admissible(point, pair: tuple = (1, 2), reading: str = "own", min_gap: float = 1e-2,
               max_cond: float = 1e-6) -> bool:
    """Sample-point filter: real distinct roots, nonzero f^i, a well-conditioned
    frame, and for the square-root rows positive (P1, P2) coordinates (roots of
    the characteristic equation for ``own``, closed form for ``closed``)."""
    u1, u2 = float(point["u1"]), float(point["u2"])
    if u2 * (u2 - u1) <= 0 or abs(u1) < 1e-3 or abs(u2) < 1e-3:
        return False
    l1, l2 = lambda_closed_form(u1, u2)
    if abs(l1 - l2) < min_gap or min(abs(l1), abs(l2)) < min_gap:
        return False
    if needs_sqrt(pair):
        sign = -1 if reading == "own" else 1
        if min(sign * l1, sign * l2) <= 0:
            return False
    try:
        res = central_invariants_at(*pair, point, exact=False)
    except (ValueError, ZeroDivisionError):
        return False
    return res.condition < max_cond


def sample_points(n: int, pair: tuple, seed: int = 42, box: float = 5.0, reading: str = "own") -> list:
    rng = random.Random(seed)
    pts = []
    while len(pts) < n:
        p = {"u1": rng.uniform(-box, box), "u2": rng.uniform(-box, box)}
        if admissible(p, pair, reading):
            pts.append(p)
    return pts


@dataclass
class TableRowReport:
    pair: tuple
    points: int
    max_error: float
    failures: list

    @property
    def status(self) -> str:
        return "PASS" if not self.failures else "FAIL"


def reproduce_table(samples: int = 100, tol: float = 1e-9, seed: int = 42,
                    pairs=PAIRS, reading: str = "own") -> list[TableRowReport]:
    reports = []
    for pair in pairs:
        worst, fails = 0.0, []
        for p in sample_points(samples, pair, seed, reading=reading):
            r = central_invariants_at(*pair, p, exact=False)
            for i in range(2):
                want = float(table_value(pair, table_argument(r, i, reading)))
                err = abs(float(r.c[i]) - want)
                worst = max(worst, err)
                if not err < tol:
                    fails.append((p, i, float(r.c[i]), want))
        reports.append(TableRowReport(pair, samples, worst, fails))
    return reports
