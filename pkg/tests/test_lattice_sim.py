import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alkit.hierarchy import flow, h_density
from alkit.lattice_sim import (IntegrationError, LatticeState, backlund_flow_residual, conservation_report,
                               functional, named_flow, numeric_backlund_check, numeric_commutativity,
                               rk4_integrate, smooth_state)


def _site_assignment(s: LatticeState, n: int, width: int = 4) -> dict:
    N = s.N
    pt = {("P", j): s.P[(n + j) % N] for j in range(-width, width + 1)}
    pt.update({("Q", j): s.Q[(n + j) % N] for j in range(-width, width + 1)})
    return pt


def test_state_validation(tmp_path):
    with pytest.raises(ValueError):
        LatticeState(np.ones(3), np.ones(3))
    with pytest.raises(ValueError):
        LatticeState(np.ones(5), np.ones(4))
    with pytest.raises(ValueError):
        LatticeState(np.zeros(5), np.ones(5))
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"N": 6, "P": [1] * 5, "Q": [0] * 5}))
    with pytest.raises(ValueError):
        LatticeState.load(bad)


def test_state_round_trip(tmp_path):
    s = smooth_state(8)
    s.dump(tmp_path / "s.json")
    r = LatticeState.load(tmp_path / "s.json")
    assert np.array_equal(r.P, s.P) and np.array_equal(r.Q, s.Q)


@settings(max_examples=10)
@given(st.integers(0, 1000), st.sampled_from(["t0", "t1", "s0", "s1"]))
def test_compiled_flow_matches_symbolic(seed, name):
    s = smooth_state(9, seed=seed, amp=0.3)
    f = flow(name[0], int(name[1]))
    out = named_flow(name)(s.vector())
    for n in (0, 4, 8):
        pt = _site_assignment(s, n)
        assert abs(out[n] - f.p.evaluate(pt)) < 1e-12
        assert abs(out[s.N + n] - f.q.evaluate(pt)) < 1e-12


def test_functional_matches_symbolic_density():
    s = smooth_state(7, seed=3)
    dens = h_density(1)
    want = sum(dens.evaluate(_site_assignment(s, n)) for n in range(s.N))
    assert abs(functional("H1")(s.P, s.Q) - want) < 1e-12
    assert abs(functional("G0")(s.P, s.Q) + np.sum(np.log(np.abs(s.P)))) < 1e-12


def test_unknown_names():
    with pytest.raises(ValueError):
        named_flow("t7")
    with pytest.raises(ValueError):
        functional("X1")


@pytest.mark.parametrize("name", ["t0", "t1", "s0", "s1"])
def test_constant_state_is_stationary(name):
    x = LatticeState.constant(6, 1.3, -0.4).vector()
    assert np.max(np.abs(named_flow(name)(x))) < 1e-14


def test_zero_step_is_identity():
    s = smooth_state(8)
    traj = rk4_integrate(s, named_flow("t0"), 0.0, 5)
    assert np.array_equal(traj.final.vector(), s.vector())


def test_reverse_integration_returns():
    s = smooth_state(16)
    f = named_flow("s0")
    fwd = rk4_integrate(s, f, 1e-2, 100).final
    back = rk4_integrate(fwd, f, -1e-2, 100).final
    assert np.max(np.abs(back.vector() - s.vector())) < 1e-9


def test_rk4_fourth_order():
    s = smooth_state(16)
    f = named_flow("t0")
    ref = rk4_integrate(s, f, 1e-3, 400).final.vector()
    errs = [np.max(np.abs(rk4_integrate(s, f, 0.4 / n, n).final.vector() - ref)) for n in (10, 20)]
    assert 12 < errs[0] / errs[1] < 20


def test_blow_up_raises():
    s = LatticeState.constant(8, 1.0, 0.5)
    s.Q[0] += 1e-3  # P Q > 0 is unstable
    with pytest.raises(IntegrationError):
        rk4_integrate(s, named_flow("t0"), 0.5, 2000)


@pytest.mark.parametrize("name", ["t0", "s0"])
def test_short_conservation(name):
    traj = rk4_integrate(smooth_state(16), named_flow(name), 1e-3, 500, every=100)
    rep = conservation_report(traj, ("H-1", "H0", "H1", "G0", "G1"))
    assert rep.worst() < 1e-10, rep.drift


def test_non_conserved_quantity_drifts():
    from alkit.lattice_sim import compile_density
    from alkit.hierarchy import P
    traj = rk4_integrate(smooth_state(16), named_flow("t0"), 1e-2, 100)
    F = compile_density(P() * P())
    assert abs(F(traj.final.P, traj.final.Q) - F(traj.state(0).P, traj.state(0).Q)) > 1e-6


def test_commutativity_order():
    study = numeric_commutativity(named_flow("t0"), named_flow("s0"), smooth_state(16))
    assert study.min_order >= 3


def test_backlund_defect_small():
    s = smooth_state(16)
    assert backlund_flow_residual(s) < 1e-12
    assert numeric_backlund_check(s, dt=1e-2, steps=50, every=10) < 1e-10


def test_backlund_fails_for_single_flow():
    from alkit.lattice_sim import backlund_state
    s = smooth_state(16)
    f = named_flow("t0")
    a = backlund_state(rk4_integrate(s, f, 1e-2, 20).final).vector()
    b = rk4_integrate(backlund_state(s), f, 1e-2, 20).final.vector()
    assert np.max(np.abs(a - b)) > 1e-6
