"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import time

import pytest

from alkit.central_invariants import compare_printed_blocks, reproduce_table
from alkit.dispersionless import dispersionless_suite
from alkit.duality import (CONJUGATIONS, verify_backlund_symbolic, verify_conjugation,
                           verify_flow_interchange)
from alkit.hierarchy import (PRINTED_FLOWS, LaxContext, flow, hierarchy_coefficients, lax_flow,
                             printed_flow, proof_identities, verify_hamiltonian_representation)
from alkit.lattice_sim import (conservation_report, named_flow, numeric_backlund_check,
                               numeric_commutativity, rk4_integrate, smooth_state)
from alkit.trihamiltonian import constant_form_check, verify_trihamiltonian


@pytest.fixture
def report(capsys):
    def emit(num: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {num}: {detail}")
        assert ok, detail
    return emit


def test_c01_flow_regression(report):
    t0 = time.perf_counter()
    bad = []
    for d, k in PRINTED_FLOWS:
        got, want = flow(d, k), printed_flow(d, k)
        if str(got.p) != str(want.p) or str(got.q) != str(want.q) or not (got - want).is_zero():
            bad.append(f"{d}{k}")
    dt = time.perf_counter() - t0
    report(1, not bad and dt < 10, f"flows t0 t1 s0 s1 match reference; mismatches={bad}; {dt:.2f}s")


def test_c02_lax_agreement(report):
    t0 = time.perf_counter()
    bad = []
    for k in range(3):
        ctx = LaxContext(k + 3)
        for d in ("t", "s"):
            res = lax_flow(k, d, ctx)
            if res.stray or not (res.flow - flow(d, k, ctx)).is_zero():
                bad.append(f"{d}{k}")
    dt = time.perf_counter() - t0
    report(2, not bad and dt < 120, f"Lax flows equal recursion flows for k<=2; mismatches={bad}; {dt:.2f}s")


def test_c03_coefficient_recursions(report):
    viol = hierarchy_coefficients(4, 5).violations
    report(3, not viol, f"coefficient recursions for k<=4, l<=5; violations={len(viol)}")


def test_c04_hamiltonian_representations(report):
    bad = []
    for k in range(3):
        for d in ("t", "s"):
            for structure in (1, 2, 3):
                if not verify_hamiltonian_representation(k, structure, d).ok:
                    bad.append(f"P{structure}:{d}{k}")
    report(4, not bad, f"P1/P2/P3 representations with stated prefactors; failing={bad}")


def test_c05_proof_identities(report):
    bad = [f"k={k}:{r.name}" for k in range(3) for r in proof_identities(k) if not r.ok]
    report(5, not bad, f"proof identities for k<=2; failing={bad}")


def test_c06_schouten(report):
    t0 = time.perf_counter()
    reps = verify_trihamiltonian() + [constant_form_check()]
    bad = [r.label for r in reps if r.status != "PASS"]
    dt = time.perf_counter() - t0
    report(6, not bad and dt < 300, f"six brackets and constant form; failing={bad}; {dt:.2f}s")


def test_c07_central_invariants(report):
    t0 = time.perf_counter()
    reps = reproduce_table(samples=100, tol=1e-9, seed=42)
    dt = time.perf_counter() - t0
    worst = max(r.max_error for r in reps)
    bad = [r.pair for r in reps if r.status != "PASS"]
    report(7, not bad and dt < 60, f"six table rows at 100 points; max error={worst:.2e}; failing={bad}; {dt:.2f}s")


def test_c08_eps_blocks(report):
    bad = [name for name, ok in compare_printed_blocks() if not ok]
    report(8, not bad, f"eps^0..eps^2 blocks of P1, P2; failing={bad}")


def test_c09_duality(report):
    checks = [verify_flow_interchange(k, d) for k in (0, 1) for d in ("t", "s")]
    checks += [verify_conjugation(*c) for c in CONJUGATIONS]
    checks.append(verify_backlund_symbolic())
    bad = [c.name for c in checks if not c.ok]
    report(9, not bad, f"interchange k<=1, three conjugations, Backlund; failing={bad}")


def test_c10_dispersionless(report):
    checks = dispersionless_suite(kmax=4)
    bad = [c.name for c in checks if not c.ok]
    report(10, not bad, f"{len(checks)} dispersionless identities; failing={bad}")


def test_c11_numeric(report):
    t0 = time.perf_counter()
    state = smooth_state(32, seed=42)
    drift = {}
    for name in ("t0", "s0"):
        traj = rk4_integrate(state, named_flow(name), 1e-3, 10_000, every=100)
        drift[name] = conservation_report(traj, ("H-1", "H0", "G0")).worst()
    order = numeric_commutativity(named_flow("t0"), named_flow("s0"), state).min_order
    bd = numeric_backlund_check(state, dt=1e-3, steps=1000, every=100)
    dt = time.perf_counter() - t0
    ok = max(drift.values()) < 1e-8 and order >= 3 and bd < 1e-6 and dt < 60
    report(11, ok, f"drift t0={drift['t0']:.1e} s0={drift['s0']:.1e}; commutator order={order:.2f}; "
                   f"Backlund={bd:.1e}; {dt:.1f}s")
