"""The hat transform exchanging positive and negative flows, the induced
conjugation of the Hamiltonian operators, and the Backlund map of the
combined flow t0 + s0."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .hierarchy import FlowPair, LaxContext, P, Q, evolution_derivative, flow
from .lambda_ops import LambdaSeries, MatrixLambdaOp
from .ring import LATTICE, Poly
from .trihamiltonian import build_operator


@dataclass(frozen=True)
class HatMap:
    """P^{(j)} -> 1/P^{(-j)}, Q^{(j)} -> Q^{(1-j)} / (P^{(-j)} P^{(1-j)}).

    With ``reverse`` False the shifts are kept (P^{(j)} -> 1/P^{(j)}, ...),
    i.e. the plain change of unknowns without n -> -n.
    """

    reverse: bool = True

    def image(self, name: str, j: int) -> Poly:
        s = -j if self.reverse else j
        if name == "P":
            return P(s).inverse()
        if name == "Q":
            return Q(s + 1) * P(s).inverse() * P(s + 1).inverse()
        raise ValueError(f"hat map acts on P, Q only, not {name}")

    def __call__(self, e: Poly) -> Poly:
        mapping = {v: self.image(*v) for v in e.even_vars()}
        return e.substitute(mapping)


HAT = HatMap()


def hat_transform(e: Poly) -> Poly:
    return HAT(e)


def hat_flow(f: FlowPair) -> FlowPair:
    return FlowPair(HAT(f.p), HAT(f.q), ("hat",) + tuple(f.label))


def hat_operator(op: MatrixLambdaOp) -> MatrixLambdaOp:
    """op with P -> P^, Q -> Q^ and Lambda -> Lambda^{-1}, written in P, Q."""
    def flip(s: LambdaSeries) -> LambdaSeries:
        return LambdaSeries({-j: HAT(c) for j, c in s.coeffs.items()}, -s.hi, -s.lo)
    return MatrixLambdaOp([[flip(op[i, j]) for j in range(2)] for i in range(2)])


@dataclass
class DualityCheck:
    name: str
    residuals: list
    ms: float = 0.0

    @property
    def ok(self) -> bool:
        return all(r.is_zero() for r in self.residuals)

    @property
    def status(self) -> str:
        return "PASS" if self.ok else "FAIL"

    def summary(self) -> str:
        bad = [str(r) for r in self.residuals if not r.is_zero()]
        return "0" if not bad else "; ".join(bad)


def _hat_fields() -> tuple[Poly, Poly]:
    return HAT(P(0)), HAT(Q(0))


def pushforward_residual(X: FlowPair, Y: FlowPair) -> list[Poly]:
    """D_X(P^) - Y_P(P^, Q^), D_X(Q^) - Y_Q(P^, Q^)."""
    ph, qh = _hat_fields()
    return [evolution_derivative(ph, X) - HAT(Y.p), evolution_derivative(qh, X) - HAT(Y.q)]


def verify_flow_interchange(k: int, direction: str, ctx: LaxContext | None = None) -> DualityCheck:
    """The t_k flow read in hat variables is the s_k flow, and conversely."""
    t0 = time.perf_counter()
    other = {"t": "s", "s": "t"}[direction]
    res = pushforward_residual(flow(direction, k, ctx), flow(other, k, ctx))
    return DualityCheck(f"interchange {direction}{k}->{other}{k}", res, 1e3 * (time.perf_counter() - t0))


def verify_involution(k: int, direction: str, ctx: LaxContext | None = None) -> DualityCheck:
    t0 = time.perf_counter()
    f = flow(direction, k, ctx)
    res = [HAT(HAT(f.p)) - f.p, HAT(HAT(f.q)) - f.q]
    return DualityCheck(f"involution {direction}{k}", res, 1e3 * (time.perf_counter() - t0))


# -- conjugation of the Hamiltonian operators -----------------------------------------

def jacobian() -> MatrixLambdaOp:
    """Frechet derivative of (P^, Q^) with respect to (P, Q), shifts kept."""
    S, L = LambdaSeries.scalar, LambdaSeries.lam
    p, pp, qp = P(0), P(1), Q(1)
    ip, ipp = p.inverse(), pp.inverse()
    return MatrixLambdaOp([
        [S(-ip * ip), LambdaSeries.zero()],
        [S(-qp * ip * ip * ipp) - S(qp * ip * ipp * ipp) @ L(1), S(ip * ipp) @ L(1)],
    ])


def jacobian_star_printed() -> MatrixLambdaOp:
    S, L = LambdaSeries.scalar, LambdaSeries.lam
    p, pm, pp = P(0), P(-1), P(1)
    ip = p.inverse()
    return MatrixLambdaOp([
        [S(-ip * ip), S(-Q(1) * ip * ip * pp.inverse()) - S(Q(0) * ip * ip * pm.inverse()) @ L(-1)],
        [LambdaSeries.zero(), S(ip * pm.inverse()) @ L(-1)],
    ])


# (source operator, target operator, sign) for J P_a J* = sign * hat(P_b)
CONJUGATIONS = ((2, 2, 1), (1, 3, -1), (3, 1, -1))


def _operator_residuals(diff: MatrixLambdaOp) -> list[Poly]:
    return [c for i in range(2) for j in range(2) for c in diff[i, j].coeffs.values()] or \
        [Poly.const(0, LATTICE)]


def verify_adjoint_of_jacobian() -> DualityCheck:
    t0 = time.perf_counter()
    diff = jacobian().adjoint() - jacobian_star_printed()
    return DualityCheck("J* = adjoint(J)", _operator_residuals(diff), 1e3 * (time.perf_counter() - t0))


def verify_conjugation(source: int, target: int, sign: int) -> DualityCheck:
    t0 = time.perf_counter()
    J = jacobian()
    lhs = J @ build_operator(source) @ J.adjoint()
    rhs = hat_operator(build_operator(target)) * sign
    pre = "-" if sign < 0 else ""
    return DualityCheck(f"J P{source} J* = {pre}hat(P{target})", _operator_residuals(lhs - rhs),
                        1e3 * (time.perf_counter() - t0))


def conjugate_operators() -> list[DualityCheck]:
    return [verify_adjoint_of_jacobian()] + [verify_conjugation(*c) for c in CONJUGATIONS]


# -- Backlund transformation ------------------------------------------------------------

def combined_flow(ctx: LaxContext | None = None) -> FlowPair:
    return flow("t", 0, ctx) + flow("s", 0, ctx)


def verify_backlund_symbolic(ctx: LaxContext | None = None) -> DualityCheck:
    """The combined flow is mapped to itself by the hat map with n -> -n."""
    t0 = time.perf_counter()
    X = combined_flow(ctx)
    return DualityCheck("backlund t0+s0", pushforward_residual(X, X), 1e3 * (time.perf_counter() - t0))


def backlund_constant(p0, q0):
    """Image of the constant solution P = p0, Q = q0."""
    return 1 / p0, q0 / (p0 * p0)


def backlund_transform(Pv: np.ndarray, Qv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P(n) -> 1/P(-n), Q(n) -> Q(1-n) / (P(-n) P(1-n)) on a periodic lattice."""
    N = len(Pv)
    n = np.arange(N)
    Pm, Pm1, Qm1 = Pv[(-n) % N], Pv[(1 - n) % N], Qv[(1 - n) % N]
    return 1.0 / Pm, Qm1 / (Pm * Pm1)


def duality_suite(kmax: int = 1, ctx: LaxContext | None = None) -> list[DualityCheck]:
    checks = []
    for k in range(kmax + 1):
        for d in ("t", "s"):
            checks.append(verify_flow_interchange(k, d, ctx))
        for d in ("t", "s"):
            checks.append(verify_involution(k, d, ctx))
    checks.extend(conjugate_operators())
    checks.append(verify_backlund_symbolic(ctx))
    return checks
