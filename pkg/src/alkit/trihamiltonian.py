"""The three Hamiltonian operators, their bivector functionals, and the
lattice Schouten bracket."""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .calculus import LocalFunctional, canonical_form, variational_derivative
from .lambda_ops import LambdaSeries, MatrixLambdaOp
from .ring import LATTICE, Poly

S = LambdaSeries.scalar
L = LambdaSeries.lam
ONE = S(1)

# Lattice fields are P, Q; super densities use u1, u2 with odd theta_1, theta_2.
FIELD_NAMES = ("P", "Q")
SUPER_NAMES = ("u1", "u2")


def _fields(shift_p=0, shift_q=0):
    return Poly.var("P", shift_p, LATTICE), Poly.var("Q", shift_q, LATTICE)


def p1_operator() -> MatrixLambdaOp:
    P, Q = _fields()
    return MatrixLambdaOp([
        [S(Q) @ L(-1) - L(1) @ S(Q), (ONE - L(1)) @ S(Q)],
        [S(Q) @ (L(-1) - ONE), LambdaSeries.zero()],
    ])


def p2_operator() -> MatrixLambdaOp:
    P, Q = _fields()
    return MatrixLambdaOp([
        [LambdaSeries.zero(), S(P) @ (L(1) - ONE) @ S(Q)],
        [S(Q) @ (ONE - L(-1)) @ S(P), S(Q) @ (L(1) - L(-1)) @ S(Q)],
    ])


def _q_minus_lql():
    """Q - Lambda Q Lambda."""
    _, Q = _fields()
    return S(Q) - L(1) @ S(Q) @ L(1)


def k22_three_term() -> LambdaSeries:
    """The expanded three-summand form of the (2,2) entry of P3."""
    P, Q = _fields()
    Pm = Poly.var("P", -1, LATTICE)
    one_plus = ONE + L(-1)
    return (S(Q) @ one_plus @ _q_minus_lql() @ one_plus @ S(Q)
            + S(Q) @ one_plus @ S(P) @ (L(1) - ONE) @ S(Q)
            + S(Q) @ (L(1) - ONE) @ S(Pm) @ one_plus @ S(Q))


def p3_operator() -> MatrixLambdaOp:
    P, Q = _fields()
    one_plus = ONE + L(-1)
    k11 = S(P) @ (S(Q) @ L(-1) - L(1) @ S(Q)) @ S(P)
    k12 = S(P) @ (_q_minus_lql() @ one_plus - S(P) @ (ONE - L(1))) @ S(Q)
    k21 = S(Q) @ ((L(1) + ONE) @ (L(-1) @ S(Q) @ L(-1) - S(Q)) + (ONE - L(-1)) @ S(P)) @ S(P)
    k22 = S(Q) @ (one_plus @ _q_minus_lql() @ one_plus
                  + (S(P) @ L(1) - L(-1) @ S(P)) * 2) @ S(Q)
    return MatrixLambdaOp([[k11, k12], [k21, k22]])


def build_operator(op_id: int) -> MatrixLambdaOp:
    try:
        return {1: p1_operator, 2: p2_operator, 3: p3_operator}[op_id]()
    except KeyError:
        raise ValueError(f"no Hamiltonian operator with id {op_id}") from None


def is_antisymmetric(op: MatrixLambdaOp) -> bool:
    return op.adjoint() == -op


# -- super functionals ------------------------------------------------------------

def to_super(e: Poly) -> Poly:
    return e.rename(dict(zip(FIELD_NAMES, SUPER_NAMES)))


@dataclass(frozen=True)
class SuperBivector:
    density: Poly
    source: str = ""

    @property
    def canonical(self) -> Poly:
        return canonical_form(self.density)


def bivector_functional(op: MatrixLambdaOp, source: str = "") -> SuperBivector:
    """Density 1/2 sum theta_a (P^{ab} theta_b) in the variables u1, u2."""
    if not is_antisymmetric(op):
        raise ValueError("bivector functional needs an antisymmetric operator")
    thetas = [Poly.odd(1, 0, LATTICE), Poly.odd(2, 0, LATTICE)]
    dens = Poly.const(0, LATTICE)
    for a in range(2):
        for b in range(2):
            dens = dens + thetas[a] * op[a, b].apply(thetas[b])
    return SuperBivector(canonical_form(to_super(dens * Fraction(1, 2))), source)


def theta_degree(e: Poly) -> int:
    degs = e.odd_degrees()
    if len(degs) != 1:
        raise ValueError("density is not homogeneous in the odd variables")
    return next(iter(degs))


def schouten_bracket(F, G) -> Poly:
    """Canonical density of [F, G] = int(dF/dtheta_a dG/du^a + (-1)^p dF/du^a dG/dtheta_a),
    p the theta-degree of F."""
    f = F.density if isinstance(F, SuperBivector) else F
    g = G.density if isinstance(G, SuperBivector) else G
    p = theta_degree(f)
    ff, gg = LocalFunctional(f, LATTICE), LocalFunctional(g, LATTICE)
    total = Poly.const(0, LATTICE)
    for alpha, name in ((1, "u1"), (2, "u2")):
        total = total + variational_derivative(ff, alpha) * variational_derivative(gg, name)
        term = variational_derivative(ff, name) * variational_derivative(gg, alpha)
        total = total + (term if p % 2 == 0 else -term)
    return canonical_form(total)


@dataclass
class BracketReport:
    label: str
    residual: Poly
    ms: float = 0.0

    @property
    def status(self) -> str:
        return "PASS" if self.residual.is_zero() else "FAIL"


def standard_bivectors() -> dict:
    return {name: bivector_functional(build_operator(i), name)
            for i, name in ((1, "I"), (2, "J"), (3, "K"))}


def verify_trihamiltonian() -> list[BracketReport]:
    bv = standard_bivectors()
    reports = []
    for a, b in (("I", "I"), ("J", "J"), ("K", "K"), ("I", "J"), ("I", "K"), ("J", "K")):
        t0 = time.perf_counter()
        res = schouten_bracket(bv[a], bv[b])
        reports.append(BracketReport(f"[{a},{b}]", res, 1e3 * (time.perf_counter() - t0)))
    return reports


def pencil_bracket() -> Poly:
    """[I + l J + m K, I + l J + m K] with formal parameters l, m."""
    bv = standard_bivectors()
    lam, mu = Poly.param("lam"), Poly.param("mu")
    dens = bv["I"].density + lam * bv["J"].density + mu * bv["K"].density
    return schouten_bracket(dens, dens)


def constant_form_operator() -> MatrixLambdaOp:
    """J P1 J^T for the Jacobian of v1 = Q - P, v2 = log Q."""
    _, Q = _fields()
    J = MatrixLambdaOp([[S(-1), S(1)], [LambdaSeries.zero(), S(Q.inverse())]])
    return J @ p1_operator() @ J.adjoint()


def constant_form_target() -> MatrixLambdaOp:
    return MatrixLambdaOp([[LambdaSeries.zero(), L(1) - ONE], [ONE - L(-1), LambdaSeries.zero()]])


def constant_form_check() -> BracketReport:
    t0 = time.perf_counter()
    diff = constant_form_operator() - constant_form_target()
    # any nonzero coefficient is a failure; report the first one found
    bad = [c for i in range(2) for j in range(2) for c in diff[i, j].coeffs.values()]
    return BracketReport("constant-form", bad[0] if bad else Poly.const(0, LATTICE),
                         1e3 * (time.perf_counter() - t0))
