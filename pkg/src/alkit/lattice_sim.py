"""Periodic-lattice numerics for the flows t0, t1, s0, s1: compiled
evaluators, RK4, conserved quantities, commutativity and Backlund defects."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .duality import backlund_transform
from .hierarchy import FlowPair, LaxContext, flow, g_density, h_density
from .ring import Poly

FLOW_NAMES = ("t0", "t1", "s0", "s1")
FUNCTIONALS = ("H-1", "H0", "H1", "G0", "G1")


@dataclass
class LatticeState:
    P: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        self.P = np.asarray(self.P, dtype=float)
        self.Q = np.asarray(self.Q, dtype=float)
        if self.P.shape != self.Q.shape or self.P.ndim != 1:
            raise ValueError("P and Q must be 1-d arrays of equal length")
        if self.N < 4:
            raise ValueError("need at least 4 sites")
        if np.min(np.abs(self.P)) < 1e-8:
            raise ValueError("P must stay away from zero")

    @property
    def N(self) -> int:
        return len(self.P)

    def vector(self) -> np.ndarray:
        return np.concatenate([self.P, self.Q])

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "LatticeState":
        n = len(x) // 2
        return cls(x[:n].copy(), x[n:].copy())

    @classmethod
    def constant(cls, N: int, p0: float, q0: float) -> "LatticeState":
        return cls(np.full(N, float(p0)), np.full(N, float(q0)))

    @classmethod
    def load(cls, path) -> "LatticeState":
        data = json.loads(Path(path).read_text())
        if len(data["P"]) != data["N"] or len(data["Q"]) != data["N"]:
            raise ValueError("N does not match the lengths of P and Q")
        return cls(data["P"], data["Q"])

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps({"N": self.N, "P": self.P.tolist(), "Q": self.Q.tolist()}))


def smooth_state(N: int = 32, seed: int = 42, amp: float = 0.1, modes: int = 3) -> LatticeState:
    """P ~ 1, Q ~ -1/2 plus a few low Fourier modes with random phases.

    Constant states with P Q > 0 are linearly unstable for every flow; P Q < 0
    is neutrally stable, so the base state sits there.
    """
    rng = np.random.default_rng(seed)
    n = np.arange(N)
    fields = []
    for base in (1.0, -0.5):
        f = np.full(N, base)
        for m in range(1, modes + 1):
            f += amp / m * rng.uniform(-1, 1) * np.cos(2 * np.pi * m * n / N + rng.uniform(0, 2 * np.pi))
        fields.append(f)
    return LatticeState(*fields)


# -- compilation ------------------------------------------------------------------------

def _compile_poly(e: Poly) -> Callable:
    terms = []
    for (even, odd), c in e.terms.items():
        if odd:
            raise ValueError("cannot compile odd expressions")
        factors = []
        for (name, idx), k in even:
            if name not in ("P", "Q") or idx is None:
                raise ValueError(f"unsupported variable {name}")
            factors.append((name, idx, k))
        terms.append((float(c), factors))

    def evaluate(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        cache: dict = {}
        out = np.zeros_like(P)
        for c, factors in terms:
            t = np.full_like(P, c)
            for name, idx, k in factors:
                key = (name, idx)
                if key not in cache:
                    # f^{(j)}(n) = f(n + j)
                    cache[key] = np.roll(P if name == "P" else Q, -idx)
                t = t * cache[key] ** k
            out = out + t
        return out
    return evaluate


@dataclass
class CompiledFlow:
    label: str
    fp: Callable
    fq: Callable

    def __call__(self, x: np.ndarray) -> np.ndarray:
        n = len(x) // 2
        P, Q = x[:n], x[n:]
        return np.concatenate([self.fp(P, Q), self.fq(P, Q)])


def compile_flow(f: FlowPair) -> CompiledFlow:
    return CompiledFlow("".join(map(str, f.label)), _compile_poly(f.p), _compile_poly(f.q))


def named_flow(name: str, ctx: LaxContext | None = None) -> CompiledFlow:
    """'t0', 's1', or a sum such as 't0+s0'."""
    parts = name.split("+")
    total = None
    for p in parts:
        if p not in FLOW_NAMES:
            raise ValueError(f"unknown flow {p!r}; choose from {FLOW_NAMES}")
        f = flow(p[0], int(p[1:]), ctx)
        total = f if total is None else total + f
    out = compile_flow(total)
    out.label = name
    return out


def compile_density(e: Poly) -> Callable:
    ev = _compile_poly(e)
    return lambda P, Q: float(np.sum(ev(P, Q)))


def functional(name: str, ctx: LaxContext | None = None) -> Callable:
    """Lattice sum of H_k or G_k densities; G0 = -sum log|P|."""
    if name == "G0":
        return lambda P, Q: -float(np.sum(np.log(np.abs(P))))
    if name == "H-1":
        return compile_density(Poly.var("Q") - Poly.var("P"))
    if name.startswith("H"):
        return compile_density(h_density(int(name[1:]), ctx))
    if name.startswith("G"):
        return compile_density(g_density(int(name[1:]), ctx))
    raise ValueError(f"unknown functional {name!r}")


# -- integration ------------------------------------------------------------------------

class IntegrationError(RuntimeError):
    pass


def rk4_step(f: Callable, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (samples, 2N)
    label: str = ""

    def state(self, i: int) -> LatticeState:
        return LatticeState.from_vector(self.states[i])

    @property
    def final(self) -> LatticeState:
        return self.state(-1)


def rk4_integrate(s: LatticeState, f: Callable, dt: float, steps: int, every: int = 0) -> Trajectory:
    """Classical RK4; keeps every ``every``-th state (default: first and last)."""
    x = s.vector()
    every = every or max(steps, 1)
    times, states = [0.0], [x.copy()]
    for i in range(1, steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            x = rk4_step(f, x, dt)
        if not np.all(np.isfinite(x)):
            raise IntegrationError(f"non-finite state at step {i}")
        if i % every == 0 or i == steps:
            times.append(i * dt)
            states.append(x.copy())
    return Trajectory(np.array(times), np.array(states), getattr(f, "label", ""))


@dataclass
class ConservationReport:
    flow: str
    drift: dict = field(default_factory=dict)

    def worst(self) -> float:
        return max(self.drift.values()) if self.drift else 0.0


def conservation_report(traj: Trajectory, names=("H-1", "H0", "G0"),
                        ctx: LaxContext | None = None) -> ConservationReport:
    rep = ConservationReport(traj.label)
    for name in names:
        F = functional(name, ctx)
        vals = [F(*_split(x)) for x in traj.states]
        ref = abs(vals[0]) or 1.0
        rep.drift[name] = max(abs(v - vals[0]) for v in vals) / ref
    return rep


def _split(x: np.ndarray):
    n = len(x) // 2
    return x[:n], x[n:]


# -- commutativity and Backlund ---------------------------------------------------------

def commutativity_defect(fa: Callable, fb: Callable, x: np.ndarray, h: float) -> float:
    """|Phi_A^h Phi_B^h x - Phi_B^h Phi_A^h x| with one RK4 step per map."""
    ab = rk4_step(fa, rk4_step(fb, x, h), h)
    ba = rk4_step(fb, rk4_step(fa, x, h), h)
    return float(np.max(np.abs(ab - ba)))


@dataclass
class OrderStudy:
    hs: list
    defects: list

    @property
    def orders(self) -> list:
        out = []
        for (h1, d1), (h2, d2) in zip(zip(self.hs, self.defects), zip(self.hs[1:], self.defects[1:])):
            out.append(math.log(d1 / d2) / math.log(h1 / h2) if d1 > 0 and d2 > 0 else math.inf)
        return out

    @property
    def min_order(self) -> float:
        return min(self.orders) if self.orders else math.inf


def numeric_commutativity(fa: Callable, fb: Callable, state: LatticeState,
                          hs=(0.2, 0.1, 0.05, 0.025)) -> OrderStudy:
    x = state.vector()
    return OrderStudy(list(hs), [commutativity_defect(fa, fb, x, h) for h in hs])


def backlund_state(s: LatticeState) -> LatticeState:
    return LatticeState(*backlund_transform(s.P, s.Q))


def numeric_backlund_check(state: LatticeState, dt: float = 1e-3, steps: int = 1000,
                           every: int = 100, ctx: LaxContext | None = None) -> float:
    """Max over sampled times of |B(Phi_t x) - Phi_t(B x)| for the combined flow t0 + s0."""
    f = named_flow("t0+s0", ctx)
    direct = rk4_integrate(state, f, dt, steps, every)
    mapped = rk4_integrate(backlund_state(state), f, dt, steps, every)
    worst = 0.0
    for i in range(len(direct.times)):
        b = backlund_state(direct.state(i)).vector()
        worst = max(worst, float(np.max(np.abs(b - mapped.states[i]))))
    return worst


def backlund_flow_residual(s: LatticeState, ctx: LaxContext | None = None) -> float:
    """|d/dt B(x) - F(B(x))| with d/dt B(x) by the chain rule along F."""
    f = named_flow("t0+s0", ctx)
    P, Q = s.P, s.Q
    dP, dQ = _split(f(s.vector()))
    N = len(P)
    n = np.arange(N)
    i0, i1 = (-n) % N, (1 - n) % N
    Pp = -dP[i0] / P[i0] ** 2
    Qp = dQ[i1] / (P[i0] * P[i1]) - Q[i1] * (dP[i0] * P[i1] + P[i0] * dP[i1]) / (P[i0] * P[i1]) ** 2
    want = f(backlund_state(s).vector())
    return float(np.max(np.abs(np.concatenate([Pp, Qp]) - want)))
