"""Positive and negative flows of the Ablowitz-Ladik hierarchy, its
Hamiltonians, gradients and the identities behind the Hamiltonian
representations."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .calculus import LocalFunctional, shift, variational_derivative
from .lambda_ops import LambdaSeries, WindowError, compose
from .ring import LATTICE, Poly
from .trihamiltonian import build_operator

S = LambdaSeries.scalar
LAM = LambdaSeries.lam


def P(i: int = 0) -> Poly:
    return Poly.var("P", i, LATTICE)


def Q(i: int = 0) -> Poly:
    return Poly.var("Q", i, LATTICE)


def default_depth(k: int) -> int:
    """Expansion depth for flow level k (env ALKIT_DEPTH overrides)."""
    env = os.environ.get("ALKIT_DEPTH")
    return int(env) if env else k + 3


@dataclass(frozen=True)
class FlowPair:
    p: Poly
    q: Poly
    label: tuple = ("t", 0)

    def __iter__(self):
        return iter((self.p, self.q))

    def __sub__(self, other: "FlowPair") -> "FlowPair":
        return FlowPair(self.p - other.p, self.q - other.q, self.label)

    def __add__(self, other: "FlowPair") -> "FlowPair":
        return FlowPair(self.p + other.p, self.q + other.q, self.label)

    def scaled(self, c) -> "FlowPair":
        return FlowPair(self.p * Fraction(c), self.q * Fraction(c), self.label)

    def is_zero(self) -> bool:
        return self.p.is_zero() and self.q.is_zero()


class LaxContext:
    """Truncated A, B and the four Lax operators at a fixed depth, with cached
    powers.  Coefficient (k, l) of any power needs ``depth >= l``."""

    def __init__(self, depth: int):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        self.depth = depth
        self.A = LAM(1) - S(P())
        self.B = S(1) - LambdaSeries({-1: Q()})
        self.B_inv = self.B.inverse(depth, "down")
        self.A_inv = self.A.inverse(depth, "up")
        self._base = {
            "L": compose(self.B_inv, self.A),
            "Lt": compose(self.A, self.B_inv),
            "M": compose(self.A_inv, self.B),
            "Mt": compose(self.B, self.A_inv),
        }
        self._powers: dict = {}

    def op(self, name: str) -> LambdaSeries:
        return self._base[name]

    def power(self, name: str, k: int) -> LambdaSeries:
        if k == 0:
            return S(1)
        key = (name, k)
        if key not in self._powers:
            self._powers[key] = (self._base[name] if k == 1
                                 else compose(self.power(name, k - 1), self._base[name]))
        return self._powers[key]

    def coefficient(self, kind: str, k: int, l: int) -> Poly:
        """a^k_l, b^k_l (coefficient of Lambda^{k-l}) or c^k_l, d^k_l
        (coefficient of Lambda^{-k+l})."""
        name = {"a": "L", "b": "Lt", "c": "M", "d": "Mt"}[kind]
        j = k - l if kind in "ab" else -k + l
        return self.power(name, k).coeff(j)


@dataclass
class CoefficientTable:
    kmax: int
    lmax: int
    a: dict = field(default_factory=dict)
    b: dict = field(default_factory=dict)
    c: dict = field(default_factory=dict)
    d: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def __getitem__(self, key):
        kind, k, l = key
        return getattr(self, kind)[(k, l)]


def recursion_residuals(get, k: int, l: int) -> list[tuple[str, Poly]]:
    """Differences between consecutive members of the two chains of equal
    expressions linking the coefficients at (k, l)."""
    a = lambda kk, ll: get("a", kk, ll)
    b = lambda kk, ll: get("b", kk, ll)
    c = lambda kk, ll: get("c", kk, ll)
    d = lambda kk, ll: get("d", kk, ll)
    pos = [
        shift(a(k, l + 1), 1) - P() * a(k, l),
        b(k, l + 1) - b(k, l) * P(k - l),
        b(k + 1, l + 1) - b(k + 1, l) * Q(k + 1 - l),
        a(k + 1, l + 1) - Q() * shift(a(k + 1, l), -1),
    ]
    neg = [
        c(k, l) - Q() * shift(c(k, l + 1), -1),
        d(k, l) - Q(-k + l + 1) * d(k, l + 1),
        d(k + 1, l) - P(-k + l) * d(k + 1, l + 1),
        shift(c(k + 1, l), 1) - P() * c(k + 1, l + 1),
    ]
    out = []
    for tag, chain in (("re-coef", pos), ("re-coef-m", neg)):
        for i in range(3):
            out.append((f"{tag}[{k},{l}]#{i}", chain[i] - chain[i + 1]))
    return out


def initial_product(kind: str, k: int) -> Poly:
    """c^k_0 = prod_i Lambda^{-i}(Q/P), d^k_0 = prod_i Lambda^{-i}(Q/P^-)."""
    base = Q() / P() if kind == "c" else Q() / P(-1)
    out = Poly.const(1, LATTICE)
    for i in range(k):
        out = out * shift(base, -i)
    return out


def hierarchy_coefficients(kmax: int, lmax: int, ctx: LaxContext | None = None) -> CoefficientTable:
    """All a, b, c, d for k <= kmax + 1, l <= lmax + 1 by direct powers, with
    every recursion instance for k <= kmax, l <= lmax checked exactly."""
    if kmax < 0 or lmax < 0:
        raise ValueError("kmax and lmax must be non-negative")
    ctx = ctx or LaxContext(lmax + 1)
    if ctx.depth < lmax + 1:
        raise WindowError(f"depth {ctx.depth} too small for l <= {lmax + 1}")
    table = CoefficientTable(kmax, lmax)
    for k in range(kmax + 2):
        for l in range(lmax + 2):
            for kind in "abcd":
                getattr(table, kind)[(k, l)] = ctx.coefficient(kind, k, l)
    get = lambda kind, k, l: getattr(table, kind)[(k, l)]
    for k in range(kmax + 1):
        for l in range(lmax + 1):
            for name, r in recursion_residuals(get, k, l):
                if not r.is_zero():
                    table.violations.append((name, r))
    for k in range(kmax + 2):
        for kind in "cd":
            if get(kind, k, 0) != initial_product(kind, k):
                table.violations.append((f"initial {kind}^{k}_0", get(kind, k, 0)))
        for kind in "ab":
            if get(kind, k, 0) != Poly.const(1, LATTICE):
                table.violations.append((f"initial {kind}^{k}_0", get(kind, k, 0)))
    return table


# -- flows ------------------------------------------------------------------------

def positive_flow(k: int, ctx: LaxContext | None = None) -> FlowPair:
    ctx = ctx or LaxContext(default_depth(k))
    a = ctx.coefficient("a", k + 1, k + 1)
    b = ctx.coefficient("b", k + 1, k + 1)
    f = Fraction(1, factorial(k + 1))
    return FlowPair((b - a) * P() * f, (b - shift(a, -1)) * Q() * f, ("t", k))


def negative_flow(k: int, ctx: LaxContext | None = None) -> FlowPair:
    ctx = ctx or LaxContext(default_depth(k))
    c = ctx.coefficient("c", k + 1, k)
    d = ctx.coefficient("d", k + 1, k)
    f = Fraction(1, factorial(k + 1))
    return FlowPair((shift(c, 1) - d) * f, (c - d) * f, ("s", k))


def flow(direction: str, k: int, ctx: LaxContext | None = None) -> FlowPair:
    if direction == "t":
        return positive_flow(k, ctx)
    if direction == "s":
        return negative_flow(k, ctx)
    raise ValueError(f"direction must be 't' or 's', not {direction!r}")


@dataclass
class LaxResult:
    flow: FlowPair
    # coefficients of the A- and B-equations that must vanish identically
    stray: list


def lax_flow(k: int, direction: str, ctx: LaxContext | None = None,
             flip_projection: bool = False) -> LaxResult:
    """Flow read off the A/B form of the Lax equations.

    ``flip_projection`` moves Lambda^0 to the other side of the splitting;
    it exists as a negative control and must break the agreement with the
    coefficient formulas.
    """
    ctx = ctx or LaxContext(default_depth(k))
    if direction == "t":
        plus = lambda X: X.project_plus(include_zero=not flip_projection)
        left, right = plus(ctx.power("Lt", k + 1)), plus(ctx.power("L", k + 1))
    elif direction == "s":
        minus = lambda X: X.project_minus(include_zero=flip_projection)
        left, right = minus(ctx.power("Mt", k + 1)), minus(ctx.power("M", k + 1))
    else:
        raise ValueError(direction)
    f = Fraction(1, factorial(k + 1))
    dA = (compose(left, ctx.A) - compose(ctx.A, right)) * f
    dB = (compose(left, ctx.B) - compose(ctx.B, right)) * f
    # A_t = -P_t, B_t = -Q_t Lambda^{-1}
    stray = [(("A", j), c) for j, c in dA.coeffs.items() if j != 0]
    stray += [(("B", j), c) for j, c in dB.coeffs.items() if j != -1]
    return LaxResult(FlowPair(-dA.coeff(0), -dB.coeff(-1), (direction, k)), stray)


# -- Hamiltonians ------------------------------------------------------------------

def h_density(k: int, ctx: LaxContext | None = None) -> Poly:
    """h_k = res L^{k+2} / (k+2)!, k >= -1."""
    if k < -1:
        raise ValueError("h_k needs k >= -1")
    ctx = ctx or LaxContext(k + 2)
    return ctx.power("L", k + 2).residue() * Fraction(1, factorial(k + 2))


def g_density(k: int, ctx: LaxContext | None = None) -> Poly:
    """g_k = res M^k / (k (k+1)!), k >= 1."""
    if k < 1:
        raise ValueError("g_k needs k >= 1; G_0 is the log functional")
    ctx = ctx or LaxContext(k)
    return ctx.power("M", k).residue() * Fraction(1, k * factorial(k + 1))


def hamiltonian(family: str, k: int, ctx: LaxContext | None = None) -> LocalFunctional:
    if family == "H":
        return LocalFunctional(h_density(k, ctx), LATTICE)
    if family == "G":
        if k == 0:
            return LocalFunctional.log(-1, P(), LATTICE)
        return LocalFunctional(g_density(k, ctx), LATTICE)
    raise ValueError(family)


def gradient(functional: LocalFunctional) -> tuple[Poly, Poly]:
    return (variational_derivative(functional, "P"), variational_derivative(functional, "Q"))


def gradient_closed_form(k: int, ctx: LaxContext | None = None) -> tuple[Poly, Poly]:
    """-res(L^{k+1} B^{-1})/(k+1)!,  res(Lambda^{-1} L^{k+2} B^{-1})/(k+1)!."""
    ctx = ctx or LaxContext(k + 2)
    f = Fraction(1, factorial(k + 1))
    gp = compose(ctx.power("L", k + 1), ctx.B_inv).residue() * (-f)
    gq = compose(LAM(-1), compose(ctx.power("L", k + 2), ctx.B_inv)).residue() * f
    return gp, gq


def apply_operator(op, grad) -> FlowPair:
    p, q = op.apply(list(grad))
    return FlowPair(p, q)


@dataclass
class CheckResult:
    name: str
    residual: object

    @property
    def ok(self) -> bool:
        r = self.residual
        if isinstance(r, FlowPair):
            return r.is_zero()
        if isinstance(r, (list, tuple)):
            return all(x.is_zero() for x in r)
        return r.is_zero()

    @property
    def status(self) -> str:
        return "PASS" if self.ok else "FAIL"


def representation(k: int, structure: int, direction: str, ctx: LaxContext | None = None,
                   p3_sign: int = 1) -> FlowPair:
    """Operator-applied gradient with the stated prefactor for (k, structure, direction).

    ``p3_sign=-1`` flips the P3 prefactors on the lines that follow from
    R o P2 (every P3 line except t_0 = P3 grad G_0); the operator P3
    equals -(R o P2).
    """
    ctx = ctx or LaxContext(k + 4)
    op = build_operator(structure)
    if direction == "t":
        if structure == 1:
            fam, level, c = "H", k, Fraction(1)
        elif structure == 2:
            fam, level, c = "H", k - 1, Fraction(1, k + 1)
        elif k == 0:
            fam, level, c = "G", 0, Fraction(1)
        else:
            fam, level, c = "H", k - 2, Fraction(1, k * (k + 1))
    elif direction == "s":
        level, c = {1: (k, 1), 2: (k + 1, k + 2), 3: (k + 2, (k + 2) * (k + 3))}[structure]
        fam, c = "G", Fraction(c)
    else:
        raise ValueError(direction)
    if structure == 3 and not (direction == "t" and k == 0):
        c *= p3_sign
    return apply_operator(op, gradient(hamiltonian(fam, level, ctx))).scaled(c)


def verify_hamiltonian_representation(k: int, structure: int, direction: str,
                                      ctx: LaxContext | None = None,
                                      p3_sign: int = 1) -> CheckResult:
    ctx = ctx or LaxContext(k + 4)
    diff = representation(k, structure, direction, ctx, p3_sign) - flow(direction, k, ctx)
    tag = "" if p3_sign == 1 or structure != 3 else " (R o P2 sign)"
    return CheckResult(f"P{structure} {direction}{k}{tag}", diff)


def verify_gradient_closed_form(k: int, ctx: LaxContext | None = None) -> CheckResult:
    ctx = ctx or LaxContext(k + 3)
    cp, cq = gradient_closed_form(k, ctx)
    dp, dq = gradient(hamiltonian("H", k, ctx))
    return CheckResult(f"grad H{k}", [cp - dp, cq - dq])


def cross_recursion(k: int, ctx: LaxContext | None = None) -> CheckResult:
    """P1 grad H_k = 1/(k+1) P2 grad H_{k-1}."""
    ctx = ctx or LaxContext(k + 3)
    lhs = apply_operator(build_operator(1), gradient(hamiltonian("H", k, ctx)))
    rhs = apply_operator(build_operator(2), gradient(hamiltonian("H", k - 1, ctx))).scaled(Fraction(1, k + 1))
    return CheckResult(f"P1 grad H{k} = P2 grad H{k - 1}/{k + 1}", lhs - rhs)


# -- proof identities ----------------------------------------------------------------

def _act(op: LambdaSeries, f: Poly) -> Poly:
    return op.apply(f)


def proof_identities(k: int, ctx: LaxContext | None = None) -> list[CheckResult]:
    """The four residue identities behind both Hamiltonian representations."""
    ctx = ctx or LaxContext(k + 3)
    Lk1, Lk2 = ctx.power("L", k + 1), ctx.power("L", k + 2)
    Lt1 = ctx.power("Lt", k + 1)
    Binv = ctx.B_inv
    res = LambdaSeries.residue
    r_lb = res(compose(Lk1, Binv))
    r_m_l2b = res(compose(LAM(-1), compose(Lk2, Binv)))
    r_m_l1b = res(compose(LAM(-1), compose(Lk1, Binv)))
    r_lkb = res(compose(ctx.power("L", k), Binv))
    lhs_a = res(compose(LAM(1), Lk1)) - res(compose(Lt1, LAM(1)))
    one = S(1)
    out = []
    rhs1 = (-_act(LAM(1) @ S(Q()) - S(Q()) @ LAM(-1), r_lb)
            + _act((LAM(1) - one) @ S(Q()), r_m_l2b))
    out.append(CheckResult(f"iden-1 k={k}", lhs_a - rhs1))
    lhs2 = shift(res(Lt1), 1) - res(Lk1)
    out.append(CheckResult(f"iden-2 k={k}", lhs2 - _act(LAM(1) - one, r_lb)))
    rhs21 = _act(S(P()) @ (one - LAM(1)) @ S(Q()), r_m_l1b)
    out.append(CheckResult(f"iden-2-1 k={k}", lhs_a - rhs21))
    lhs22 = res(Lt1) - shift(res(Lk1), -1)
    rhs22 = _act((LAM(-1) - one) @ S(P()), r_lkb) + _act((LAM(1) - LAM(-1)) @ S(Q()), r_m_l1b)
    out.append(CheckResult(f"iden-2-2 k={k}", lhs22 - rhs22))
    return out


# -- vector fields ---------------------------------------------------------------------

def evolution_derivative(f: Poly, X: FlowPair) -> Poly:
    """D_X f = sum over shifted fields of df/dP^{(i)} Lambda^i(X_P) + (Q likewise)."""
    out = Poly.const(0, LATTICE)
    for v in sorted(f.even_vars(), key=lambda v: (v[0], v[1] if v[1] is not None else 0)):
        name, idx = v
        if name not in ("P", "Q") or idx is None:
            continue
        comp = X.p if name == "P" else X.q
        out = out + f.partial(v) * shift(comp, idx)
    return out


def flow_commutator(X: FlowPair, Y: FlowPair) -> FlowPair:
    """Lie bracket of evolutionary vector fields: D_X(Y) - D_Y(X)."""
    return FlowPair(evolution_derivative(Y.p, X) - evolution_derivative(X.p, Y),
                    evolution_derivative(Y.q, X) - evolution_derivative(X.q, Y),
                    ("[" + "".join(map(str, X.label)) + "," + "".join(map(str, Y.label)) + "]",))


# -- hand-entered reference flows -----------------------------------------------------------

def printed_flow(direction: str, k: int) -> FlowPair:
    """The t_0, t_1, s_0, s_1 flows in their textbook form, typed in by hand."""
    p, q = P(), Q()
    pm, pp, pmm, ppp = P(-1), P(1), P(-2), P(2)
    qm, qp, qmm, qpp = Q(-1), Q(1), Q(-2), Q(2)
    half = Fraction(1, 2)
    inv = Poly.inverse
    if (direction, k) == ("t", 0):
        return FlowPair(p * (qp - q), q * (qp - qm - p + pm), ("t", 0))
    if (direction, k) == ("t", 1):
        fp = p * (p * q - p * qp + pm * q - pp * qp + qp * qpp + qp * qp - q * qm - q * q) * half
        fq = q * (p * p - pm * pm - pp * qp - p * qp * 2 - p * q + pm * q + pm * qm * 2 + pmm * qm
                  + qp * qpp + qp * qp + q * qp - qm * qmm - q * qm - qm * qm) * half
        return FlowPair(fp, fq, ("t", 1))
    if (direction, k) == ("s", 0):
        return FlowPair(qp * inv(pp) - q * inv(pm), q * inv(p) - q * inv(pm), ("s", 0))
    if (direction, k) == ("s", 1):
        fp = (inv(pp) * half * (qp * qpp * inv(pp * ppp) - qp * inv(pp) + qp * qp * inv(p * pp) - qp * inv(p))
              - inv(pm) * half * (q * qm * inv(pm * pmm) - q * inv(pm) + q * q * inv(p * pm) - q * inv(p)))
        fq = (inv(p) * half * (q * qp * inv(p * pp) - q * inv(p) + q * q * inv(p * pm))
              - inv(pm) * half * (q * qm * inv(pm * pmm) - q * inv(pm) + q * q * inv(p * pm)))
        return FlowPair(fp, fq, ("s", 1))
    raise ValueError(f"no reference flow for {direction}{k}")


PRINTED_FLOWS = (("t", 0), ("t", 1), ("s", 0), ("s", 1))
