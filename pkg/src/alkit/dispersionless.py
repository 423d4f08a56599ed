"""The Frobenius-manifold layer: potential, intersection form, theta
polynomials, hydrodynamic flows and their recursions, and the match with the
leading order of the lattice hierarchy.

Jet variables are v1, v2 with w = exp(v2) and log(v1) as generators.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .calculus import integrate_total_derivative, total_derivative
from .central_invariants import DiffOp, eps_series, expanded
from .hierarchy import LaxContext, flow
from .rational import RatExpr
from .ring import JET, Poly

V = ("v1", "v2")


def v(alpha: int, order: int = 0) -> Poly:
    return Poly.var(f"v{alpha}", order, JET)


def w() -> Poly:
    return Poly.var("w", 0, JET)


def log_v1() -> Poly:
    return Poly.var("log(v1)", 0, JET)


def _c(x) -> Poly:
    return Poly.const(x, JET)


def _partial(e, alpha: int):
    return e.partial((f"v{alpha}", 0))


ETA = ((0, 1), (1, 0))


# -- Frobenius data -----------------------------------------------------------------

@dataclass
class FrobeniusData:
    potential: Poly
    eta: tuple
    unity: tuple
    euler: tuple
    g: list

    def g_printed(self) -> list:
        v1, ww = v(1), w()
        return [[v1 * ww * 2, v1 + ww], [v1 + ww, _c(2)]]

    def g_matches(self) -> bool:
        return all(RatExpr.of(self.g[i][j]) == RatExpr.of(self.g_printed()[i][j])
                   for i in range(2) for j in range(2))


def potential() -> Poly:
    v1, v2 = v(1), v(2)
    return v1 * v1 * v2 * Fraction(1, 2) + v1 * w() + v1 * v1 * log_v1() * Fraction(1, 2)


def intersection_form(F: Poly, euler) -> list:
    """g^{ab} = E^c eta^{ax} eta^{bz} d^3F / dv^c dv^x dv^z."""
    third = {}
    for a in (1, 2):
        for b in (1, 2):
            for c in (1, 2):
                third[a, b, c] = _partial(_partial(_partial(F, a), b), c)
    g = [[_c(0)] * 2 for _ in range(2)]
    for a in range(2):
        for b in range(2):
            total = _c(0)
            for x in range(2):
                for z in range(2):
                    if not (ETA[a][x] and ETA[b][z]):
                        continue
                    for c in range(2):
                        total = total + euler[c] * third[c + 1, x + 1, z + 1]
            g[a][b] = total
    return g


def frobenius_data() -> FrobeniusData:
    F = potential()
    v1, ww = v(1), w()
    unity = (RatExpr(v1, v1 - ww), RatExpr(_c(-1), v1 - ww))
    euler = (v1, _c(1))
    return FrobeniusData(F, ETA, unity, euler, intersection_form(F, euler))


# -- theta polynomials and negative densities ----------------------------------------

def theta(k: int) -> Poly:
    """theta_{2,k} as the binomial sum."""
    if k < 0:
        raise ValueError("theta_{2,k} needs k >= 0")
    v1, ww = v(1), w()
    total = _c(0)
    for s in range(k + 2):
        total = total + ww**s * (v1 - ww) ** (k + 1 - s) * (comb(k + 1, s) * comb(k + s, s))
    return total * Fraction(1, factorial(k + 1))


def theta_printed(k: int) -> Poly:
    v1, ww = v(1), w()
    return {
        0: v1,
        1: v1 * ww + v1 * v1 * Fraction(1, 2),
        2: v1 * ww * ww * Fraction(1, 2) + v1 * v1 * ww + v1**3 * Fraction(1, 6),
    }[k]


def h_gradient(k: int) -> tuple[RatExpr, RatExpr]:
    """(dh_k/dv1, dh_k/dv2); h_0 = v2 - log(v1 - w) is differentiated by hand."""
    v1, ww = v(1), w()
    if k == 0:
        return RatExpr(_c(-1), v1 - ww), RatExpr.of(_c(1)) + RatExpr(ww, v1 - ww)
    h = h_density(k)
    return h.partial(("v1", 0)), h.partial(("v2", 0))


def h_density(k: int) -> RatExpr:
    if k < 1:
        raise ValueError("h_0 has a log term; use h_gradient(0)")
    return RatExpr(theta(k - 1) * Fraction(1, k * (k + 1)), (v(1) - w()) ** (2 * k))


# -- hydrodynamic flows -----------------------------------------------------------------

@dataclass
class HydroFlow:
    """v_t = A(v) v_x."""

    A: list
    label: str = ""

    def vector(self) -> list[RatExpr]:
        return [sum((RatExpr.of(self.A[a][b]) * RatExpr.of(v(b + 1, 1)) for b in range(2)),
                    RatExpr.of(_c(0))) for a in range(2)]

    def __eq__(self, other):
        return all(RatExpr.of(self.A[i][j]) == RatExpr.of(other.A[i][j])
                   for i in range(2) for j in range(2))


def gradient_flow(grad) -> HydroFlow:
    """v^a_t = eta^{ab} d_x(dh/dv^b): A = eta . Hessian."""
    hess = [[RatExpr.of(grad[b]).partial((f"v{c + 1}", 0)) for c in range(2)] for b in range(2)]
    return HydroFlow([[hess[1 - a][c] for c in range(2)] for a in range(2)])


def _poly_gradient(f: Poly) -> tuple:
    return _partial(f, 1), _partial(f, 2)


def principal_flow2(k: int) -> HydroFlow:
    """t^{2,k}, from theta_{2,k+1}."""
    f = gradient_flow(_poly_gradient(theta(k + 1)))
    f.label = f"t2,{k}"
    return f


def negative_flow(k: int) -> HydroFlow:
    f = gradient_flow(h_gradient(k))
    f.label = f"s{k}"
    return f


# -- the operators P~1, P~2 acting on gradients ------------------------------------------

def p1_tilde() -> list:
    d = DiffOp.d(1)
    return [[DiffOp.zero(), d], [d, DiffOp.zero()]]


def p2_tilde() -> list:
    v1, ww = v(1), w()
    d, m = DiffOp.d(1), DiffOp.mul
    return [[m(v1 * ww * 2) @ d + m(total_derivative(v1 * ww)), m(v1 + ww) @ d],
            [m(v1 + ww) @ d + m(total_derivative(v1 + ww)), d * 2]]


def _apply_rat(op: DiffOp, f: RatExpr) -> RatExpr:
    out = RatExpr.of(_c(0))
    g = RatExpr.of(f)
    for k in range(op.order() + 1):
        c = op.coeff(k)
        if not c.is_zero():
            out = out + RatExpr.of(c) * g
        g = total_derivative(g)
    return out


def apply_matrix(op: list, grad) -> list[RatExpr]:
    return [_apply_rat(op[a][0], RatExpr.of(grad[0])) + _apply_rat(op[a][1], RatExpr.of(grad[1]))
            for a in range(2)]


def _vec_sub(x, y):
    return [RatExpr.of(a) - RatExpr.of(b) for a, b in zip(x, y)]


def _vec_scale(x, c):
    return [RatExpr.of(a) * RatExpr.of(_c(c)) for a in x]


def _theta_grad(k: int) -> tuple:
    return _poly_gradient(theta(k))


# -- the t^{1,k} flows ------------------------------------------------------------------------

def t1_flow0() -> list[Poly]:
    v1, ww = v(1), w()
    return [v(1, 1) + ww * v(2, 1), v(1, 1) * v1.inverse() + v(2, 1)]


def recursion_operator_apply(X: list) -> list[Poly]:
    """R~ X with the nonlocal tail d_x^{-1} X_2 resolved by exact integration."""
    v1, ww = v(1), w()
    tail = integrate_total_derivative(X[1])
    return [(v1 + ww) * X[0] + v1 * ww * 2 * X[1] + total_derivative(v1 * ww) * tail,
            X[0] * 2 + (v1 + ww) * X[1] + total_derivative(v1 + ww) * tail]


def _as_poly(x) -> Poly:
    x = RatExpr.of(x)
    return x.as_poly()


def t1_flows(kmax: int) -> list[list[Poly]]:
    """t^{1,k} = (1/k) R~ t^{1,k-1} - (2/k) t^{2,k-1}."""
    flows = [t1_flow0()]
    for k in range(1, kmax + 1):
        r = recursion_operator_apply(flows[-1])
        t2 = [_as_poly(c) for c in principal_flow2(k - 1).vector()]
        flows.append([(r[a] - t2[a] * 2) * Fraction(1, k) for a in range(2)])
    return flows


def jet_evolution(f, X: list) -> Poly:
    """D_X f for an evolutionary field X = (X_1, X_2) on the v-jet space."""
    f = RatExpr.of(f)
    out = RatExpr.of(_c(0))
    orders = {}
    for var in f.even_vars():
        if var[1] is None:
            continue
        name = var[0]
        base = {"w": "v2", "log(v1)": "v1"}.get(name, name)
        if base in V:
            orders[base] = max(orders.get(base, 0), var[1])
    for base, top in orders.items():
        comp = RatExpr.of(X[V.index(base)])
        for n in range(top + 1):
            d = f.partial((base, n))
            if not d.is_zero():
                out = out + d * comp
            comp = total_derivative(comp)
    return out


def commutator(X: list, Y: list) -> list[RatExpr]:
    return [jet_evolution(Y[a], X) - jet_evolution(X[a], Y) for a in range(2)]


# -- checks ------------------------------------------------------------------------------------

@dataclass
class IdentityCheck:
    name: str
    residuals: list
    ms: float = 0.0

    @property
    def ok(self) -> bool:
        return all(RatExpr.of(r).is_zero() for r in self.residuals)

    @property
    def status(self) -> str:
        return "PASS" if self.ok else "FAIL"

    def summary(self) -> str:
        bad = [str(r) for r in self.residuals if not RatExpr.of(r).is_zero()]
        return "0" if not bad else "; ".join(bad)


def _timed(name, fn) -> IdentityCheck:
    t0 = time.perf_counter()
    res = fn()
    return IdentityCheck(name, res, 1e3 * (time.perf_counter() - t0))


def theta_checks() -> list[IdentityCheck]:
    return [_timed(f"theta_2,{k} binomial = printed", lambda k=k: [theta(k) - theta_printed(k)])
            for k in range(3)]


def recursion_checks(kmax: int = 4) -> list[IdentityCheck]:
    P1, P2 = p1_tilde(), p2_tilde()
    checks = []
    for k in range(kmax + 1):
        # t^{2,k} = P~1 grad theta_{2,k+1} = 1/(k+1) P~2 grad theta_{2,k}
        checks.append(_timed(f"positive k={k}", lambda k=k: _vec_sub(
            apply_matrix(P1, _theta_grad(k + 1)),
            _vec_scale(apply_matrix(P2, _theta_grad(k)), Fraction(1, k + 1)))))
        checks.append(_timed(f"t2,{k} = P~1 grad theta", lambda k=k: _vec_sub(
            principal_flow2(k).vector(), apply_matrix(P1, _theta_grad(k + 1)))))
    checks.append(_timed("kernel P~2 grad h_0", lambda: apply_matrix(P2, h_gradient(0))))
    for k in range(1, kmax + 1):
        checks.append(_timed(f"negative k={k}", lambda k=k: _vec_sub(
            apply_matrix(P1, h_gradient(k - 1)),
            _vec_scale(apply_matrix(P2, h_gradient(k)), k + 1))))
    for k in range(kmax + 1):
        checks.append(_timed(f"s{k} = P~1 grad h", lambda k=k: _vec_sub(
            negative_flow(k).vector(), apply_matrix(P1, h_gradient(k)))))
    flows = t1_flows(kmax)
    for k in range(kmax + 1):
        checks.append(_timed(f"t1,{k} hamiltonian for P~1", lambda k=k: [t1_gradient_defect(flows[k])]))
        checks.append(_timed(f"t1,{k} commutes with t2,0 and s0", lambda k=k: commutator(
            flows[k], principal_flow2(0).vector()) + commutator(flows[k], negative_flow(0).vector())))
    return checks


def t1_gradient_defect(X: list) -> Poly:
    """X = P~1 grad theta needs (d_x^{-1} X_2, d_x^{-1} X_1) to be a gradient."""
    a, b = integrate_total_derivative(X[1]), integrate_total_derivative(X[0])
    return a.partial(("v2", 0)) - b.partial(("v1", 0))


# -- leading order of the lattice hierarchy --------------------------------------------------

def _u_images(order: int = 2) -> dict:
    """Jet substitution u1 = w - v1, u2 = w, prolonged to the given order."""
    base = {"u1": RatExpr.of(w() - v(1)), "u2": RatExpr.of(w())}
    out = {}
    for name, img in base.items():
        for n in range(order + 1):
            out[(name, n)] = img
            img = total_derivative(img)
    return out


def to_v(e) -> RatExpr:
    return RatExpr.of(e).substitute(_u_images())


def leading_flow(direction: str, k: int, ctx: LaxContext | None = None) -> list[RatExpr]:
    """eps^1 part of the lattice flow in the u-jets, pushed to v1 = u2 - u1, v2 = log u2."""
    f = flow(direction, k, ctx)
    parts = []
    for comp in (f.p, f.q):
        series = eps_series(comp, 1)
        if 0 in series and not series[0].is_zero():
            raise ValueError(f"{direction}{k}: eps^0 part does not vanish")
        parts.append(series.get(1, _c(0)))
    ut1, ut2 = (to_v(p) for p in parts)
    return [ut2 - ut1, ut2 * RatExpr(_c(1), w())]


def dispersionless_limit_match(k: int, direction: str, ctx: LaxContext | None = None) -> IdentityCheck:
    def run():
        target = principal_flow2(k) if direction == "t" else negative_flow(k)
        return _vec_sub(leading_flow(direction, k, ctx), target.vector())
    return _timed(f"limit {direction}{k}", run)


def _transform_block(block: list) -> list:
    """J B J* with J = d(v1, v2)/d(u1, u2) = [[-1, 1], [0, 1/u2]], in v-variables."""
    u2 = Poly.var("u2", 0, JET)
    J = [[DiffOp.mul(-1), DiffOp.mul(1)], [DiffOp.zero(), DiffOp.mul(u2.inverse())]]
    Js = [[J[j][i].adjoint() for j in range(2)] for i in range(2)]

    def mm(X, Y):
        return [[X[i][0] @ Y[0][j] + X[i][1] @ Y[1][j] for j in range(2)] for i in range(2)]
    out = mm(mm(J, block), Js)
    return [[{k: to_v(c) for k, c in out[i][j].coeffs.items()} for j in range(2)] for i in range(2)]


def _op_residuals(got: list, want: list) -> list:
    res = []
    for i in range(2):
        for j in range(2):
            w_ = {k: RatExpr.of(c) for k, c in want[i][j].coeffs.items()}
            for k in set(got[i][j]) | set(w_):
                res.append(got[i][j].get(k, RatExpr.of(_c(0))) - w_.get(k, RatExpr.of(_c(0))))
    return res or [_c(0)]


def operator_match() -> list[IdentityCheck]:
    return [
        _timed("P1;0 -> P~1", lambda: _op_residuals(_transform_block(expanded(1).block(0)), p1_tilde())),
        _timed("P2;0 -> P~2", lambda: _op_residuals(_transform_block(expanded(2).block(0)), p2_tilde())),
    ]


def change_of_variables_consistent() -> IdentityCheck:
    """v1 = Q - P on the lattice and v1 = u2 - u1 on the jet space agree."""
    def run():
        lat = eps_series(Poly.var("Q") - Poly.var("P"), 0)[0]
        return [lat - (Poly.var("u2", 0, JET) - Poly.var("u1", 0, JET))]
    return _timed("v1 = Q - P = u2 - u1", run)


def dispersionless_suite(kmax: int = 4, ctx: LaxContext | None = None) -> list[IdentityCheck]:
    fd = frobenius_data()
    checks = [IdentityCheck("intersection form", [RatExpr.of(fd.g[i][j]) - RatExpr.of(fd.g_printed()[i][j])
                                                  for i in range(2) for j in range(2)])]
    checks += theta_checks()
    checks += recursion_checks(kmax)
    for k in range(min(kmax, 2) + 1):
        for d in ("t", "s"):
            checks.append(dispersionless_limit_match(k, d, ctx))
    checks += operator_match()
    checks.append(change_of_variables_consistent())
    return checks
