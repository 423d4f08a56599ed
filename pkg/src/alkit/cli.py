"""Command-line entry point: verification suites and lattice simulations.

Every subcommand builds a :class:`SuiteReport`; the exit code is 1 when any
check fails, 2 on usage errors (argparse), 0 otherwise.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Callable

STATUSES = ("PASS", "FAIL", "SKIP")


@dataclass
class Check:
    name: str
    status: str
    residual: str | None = None
    ms: float = 0.0

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "residual": self.residual,
                "ms": round(self.ms, 3)}


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)

    def add(self, name: str, ok: bool, residual=None, ms: float = 0.0) -> None:
        res = None if residual is None else str(residual)
        self.checks.append(Check(name, "PASS" if ok else "FAIL", res, ms))

    def run(self, name: str, fn: Callable[[], tuple]) -> None:
        """fn returns (ok, residual)."""
        t0 = time.perf_counter()
        ok, residual = fn()
        self.add(name, ok, residual, 1e3 * (time.perf_counter() - t0))

    @property
    def failed(self) -> bool:
        return any(c.status == "FAIL" for c in self.checks)

    def to_json(self) -> str:
        return json.dumps({"suite": self.suite, "checks": [c.as_dict() for c in self.checks]}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SuiteReport":
        data = json.loads(text)
        return cls(data["suite"], [Check(c["name"], c["status"], c["residual"], c["ms"])
                                   for c in data["checks"]])

    def to_text(self) -> str:
        width = max((len(c.name) for c in self.checks), default=10)
        lines = [f"suite: {self.suite}"]
        for c in self.checks:
            line = f"  {c.status:4}  {c.name:<{width}}  {c.ms:9.1f} ms"
            if c.status == "FAIL" and c.residual:
                line += f"  residual: {c.residual[:200]}"
            lines.append(line)
        n_fail = sum(c.status == "FAIL" for c in self.checks)
        lines.append(f"{len(self.checks) - n_fail}/{len(self.checks)} passed")
        return "\n".join(lines)


def _zero_summary(polys) -> str:
    bad = [str(p) for p in polys if not p.is_zero()]
    return "0" if not bad else "; ".join(bad)


# -- suites ----------------------------------------------------------------------------

def suite_flows(args) -> SuiteReport:
    from .hierarchy import PRINTED_FLOWS, LaxContext, default_depth, flow, hierarchy_coefficients, \
        lax_flow, printed_flow
    rep = SuiteReport("flows")
    for d, k in PRINTED_FLOWS:
        if k > args.kmax:
            continue

        def regress(d=d, k=k):
            got, want = flow(d, k), printed_flow(d, k)
            same = str(got.p) == str(want.p) and str(got.q) == str(want.q)
            return same, _zero_summary(list(got - want))
        rep.run(f"reference {d}{k}", regress)
    for k in range(args.kmax + 1):
        for d in ("t", "s"):
            def agree(d=d, k=k):
                ctx = LaxContext(default_depth(k))
                res = lax_flow(k, d, ctx, flip_projection=args.flip_projection)
                diff = res.flow - flow(d, k, ctx)
                stray = [c for _key, c in res.stray]
                return diff.is_zero() and not stray, _zero_summary(list(diff) + stray)
            rep.run(f"lax = recursion {d}{k}", agree)

    def coeffs():
        table = hierarchy_coefficients(args.kmax + 2, args.kmax + 3)
        return not table.violations, "; ".join(f"{n}: {r}" for n, r in table.violations) or "0"
    rep.run(f"coefficient recursions k<={args.kmax + 2}, l<={args.kmax + 3}", coeffs)
    return rep


def suite_hamiltonian(args) -> SuiteReport:
    from .hierarchy import LaxContext, cross_recursion, proof_identities, verify_gradient_closed_form, \
        verify_hamiltonian_representation
    rep = SuiteReport("hamiltonian")
    for structure in (1, 2, 3):
        for d in ("t", "s"):
            for k in range(args.kmax + 1):
                def one(k=k, d=d, structure=structure):
                    r = verify_hamiltonian_representation(k, structure, d, LaxContext(k + 4))
                    return r.ok, _zero_summary(list(r.residual))
                rep.run(f"P{structure} {d}{k}", one)
    if args.corrected_p3:
        for d in ("t", "s"):
            for k in range(args.kmax + 1):
                def corr(k=k, d=d):
                    r = verify_hamiltonian_representation(k, 3, d, LaxContext(k + 4), p3_sign=-1)
                    return r.ok, _zero_summary(list(r.residual))
                rep.run(f"P3 {d}{k} (R o P2 sign)", corr)
    for k in range(args.kmax + 1):
        def grad(k=k):
            r = verify_gradient_closed_form(k)
            return r.ok, _zero_summary(r.residual)
        rep.run(f"gradient closed form H{k}", grad)
    for k in range(1, args.kmax + 1):
        def cross(k=k):
            r = cross_recursion(k)
            return r.ok, _zero_summary(list(r.residual))
        rep.run(f"P1 grad H{k} = P2 grad H{k - 1}/{k + 1}", cross)
    for k in range(args.kmax + 1):
        t0 = time.perf_counter()
        results = proof_identities(k)
        ms = 1e3 * (time.perf_counter() - t0) / max(len(results), 1)
        for r in results:
            res = r.residual if isinstance(r.residual, (list, tuple)) else [r.residual]
            rep.add(f"{r.name} k={k}", r.ok, _zero_summary(res), ms)
    return rep


def suite_schouten(args) -> SuiteReport:
    from .trihamiltonian import constant_form_check, verify_trihamiltonian
    rep = SuiteReport("schouten")
    for r in verify_trihamiltonian() + [constant_form_check()]:
        rep.add(r.label, r.status == "PASS", str(r.residual), r.ms)
    return rep


def _parse_pairs(text: str):
    from .central_invariants import PAIRS
    if text == "all":
        return PAIRS
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--pairs expects 'all' or 'i,j', got {text!r}") from None
    if (a, b) not in PAIRS:
        raise argparse.ArgumentTypeError(f"no table row for pair ({a},{b})")
    return ((a, b),)


def suite_central(args) -> SuiteReport:
    from .central_invariants import compare_printed_blocks, expanded, homogeneity_defects, reproduce_table
    rep = SuiteReport("central")
    t0 = time.perf_counter()
    for name, ok in compare_printed_blocks():
        rep.add(f"reference block {name}", ok, None if ok else "mismatch", 1e3 * (time.perf_counter() - t0))
        t0 = time.perf_counter()
    for op_id in (1, 2, 3):
        rep.run(f"homogeneity P{op_id}", lambda op_id=op_id: (
            not homogeneity_defects(expanded(op_id)), str(homogeneity_defects(expanded(op_id)) or 0)))
    for row in reproduce_table(args.samples, args.tol, args.seed, args.pairs, args.reading):
        rep.add(f"table row ({row.pair[0]},{row.pair[1]}) x{row.points}", row.status == "PASS",
                f"max error {row.max_error:.3e}")
    return rep


def suite_duality(args) -> SuiteReport:
    from .duality import duality_suite
    rep = SuiteReport("duality")
    for c in duality_suite(args.kmax):
        rep.add(c.name, c.ok, c.summary(), c.ms)
    return rep


def suite_dispersionless(args) -> SuiteReport:
    from .dispersionless import dispersionless_suite
    rep = SuiteReport("dispersionless")
    for c in dispersionless_suite(args.kmax):
        rep.add(c.name, c.ok, c.summary(), c.ms)
    return rep


def _load_state(args):
    from .lattice_sim import LatticeState, smooth_state
    if args.input:
        return LatticeState.load(args.input)
    return smooth_state(args.sites, args.seed)


def suite_simulate(args) -> SuiteReport:
    import numpy as np

    from .lattice_sim import conservation_report, named_flow, rk4_integrate
    rep = SuiteReport("simulate")
    state = _load_state(args)
    f = named_flow(args.flow)
    t0 = time.perf_counter()
    traj = rk4_integrate(state, f, args.dt, args.steps, args.every)
    ms = 1e3 * (time.perf_counter() - t0)
    rep.add(f"integrate {args.flow} N={state.N} dt={args.dt} steps={args.steps}", True, None, ms)
    conserve = [c for c in args.conserve.split(",") if c]
    report = conservation_report(traj, conserve)
    for name, drift in report.drift.items():
        rep.add(f"drift {name}", drift < args.drift_tol, f"{drift:.3e}")
    if args.csv:
        n = state.N
        header = "t," + ",".join(f"P{i}" for i in range(n)) + "," + ",".join(f"Q{i}" for i in range(n))
        np.savetxt(args.csv, np.column_stack([traj.times, traj.states]), delimiter=",",
                   header=header, comments="")
    return rep


def suite_backlund(args) -> SuiteReport:
    from .duality import verify_backlund_symbolic
    from .lattice_sim import backlund_flow_residual, numeric_backlund_check
    rep = SuiteReport("backlund")
    c = verify_backlund_symbolic()
    rep.add(c.name + " (symbolic)", c.ok, c.summary(), c.ms)
    state = _load_state(args)
    rep.run("chain-rule residual", lambda: (lambda r: (r < args.tol, f"{r:.3e}"))(backlund_flow_residual(state)))
    rep.run(f"trajectory defect dt={args.dt} steps={args.steps}", lambda: (lambda r: (
        r < args.tol, f"{r:.3e}"))(numeric_backlund_check(state, args.dt, args.steps)))
    return rep


SUITES = {
    "flows": suite_flows,
    "hamiltonian": suite_hamiltonian,
    "schouten": suite_schouten,
    "central": suite_central,
    "duality": suite_duality,
    "dispersionless": suite_dispersionless,
    "simulate": suite_simulate,
    "backlund": suite_backlund,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=42)

    parser = argparse.ArgumentParser(prog="alkit", description="Ablowitz-Ladik hierarchy toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("flows", parents=[common], help="recursion vs Lax flows, reference regressions")
    p.add_argument("--kmax", type=int, default=2)
    p.add_argument("--flip-projection", action="store_true",
                   help="debug: use the flipped projection convention (expected to FAIL)")

    p = sub.add_parser("hamiltonian", parents=[common], help="Hamiltonian representations and identities")
    p.add_argument("--kmax", type=int, default=2)
    p.add_argument("--corrected-p3", action="store_true",
                   help="also check the P3 lines with the R o P2 sign")

    sub.add_parser("schouten", parents=[common], help="Schouten brackets and constant form")

    p = sub.add_parser("central", parents=[common], help="eps-expansion and central invariants")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--pairs", type=_parse_pairs, default="all")
    p.add_argument("--reading", choices=("own", "closed"), default="own",
                   help="coordinate fed to the table expressions")

    p = sub.add_parser("duality", parents=[common], help="hat transform and conjugations")
    p.add_argument("--kmax", type=int, default=1)

    p = sub.add_parser("dispersionless", parents=[common], help="Frobenius manifold layer")
    p.add_argument("--kmax", type=int, default=4)

    p = sub.add_parser("simulate", parents=[common], help="RK4 on a periodic lattice")
    p.add_argument("--flow", default="t0", help="t0, t1, s0, s1 or a sum like t0+s0")
    p.add_argument("--sites", type=int, default=32)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--every", type=int, default=100)
    p.add_argument("--conserve", default="H-1,H0,G0")
    p.add_argument("--drift-tol", type=float, default=1e-8)
    p.add_argument("--input", help='JSON file {"N": int, "P": [...], "Q": [...]}')
    p.add_argument("--csv", help="write the sampled trajectory to this CSV file")

    p = sub.add_parser("backlund", parents=[common], help="Backlund map of the t0 + s0 flow")
    p.add_argument("--input", help='JSON file {"N": int, "P": [...], "Q": [...]}')
    p.add_argument("--sites", type=int, default=32)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-6)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "pairs", None) == "all":
        args.pairs = _parse_pairs("all")
    try:
        report = SUITES[args.command](args)
    except (ValueError, OSError) as exc:
        parser.error(str(exc))
    print(report.to_json() if args.report == "json" else report.to_text())
    return 1 if report.failed else 0


if __name__ == "__main__":
    sys.exit(main())
