"""Conservation, RK4 convergence and commutator order on a periodic lattice.

Usage: python3 scripts/lattice_study.py --sites 32 --steps 10000
"""
import argparse

import numpy as np

from alkit.lattice_sim import (FLOW_NAMES, FUNCTIONALS, conservation_report, named_flow, numeric_backlund_check,
                               numeric_commutativity, rk4_integrate, smooth_state)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sites", type=int, default=32)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--steps", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    state = smooth_state(args.sites, seed=args.seed)
    flows = {name: named_flow(name) for name in FLOW_NAMES}

    print("relative drift over", args.steps, "steps")
    print("flow  " + "  ".join(f"{f:>8}" for f in FUNCTIONALS))
    for name, f in flows.items():
        traj = rk4_integrate(state, f, args.dt, args.steps, every=max(args.steps // 100, 1))
        rep = conservation_report(traj, FUNCTIONALS)
        print(f"{name:4}  " + "  ".join(f"{rep.drift[k]:8.1e}" for k in FUNCTIONALS))

    print("\nRK4 convergence (t0, T = 0.4)")
    ref = rk4_integrate(state, flows["t0"], 1e-4, 4000).final.vector()
    prev = None
    for n in (5, 10, 20, 40):
        err = float(np.max(np.abs(rk4_integrate(state, flows["t0"], 0.4 / n, n).final.vector() - ref)))
        ratio = f"{prev / err:6.2f}" if prev else "     -"
        print(f"  dt = {0.4 / n:.4f}  error = {err:.3e}  ratio = {ratio}")
        prev = err

    print("\ncommutator defect |A^h B^h x - B^h A^h x|")
    for a, b in (("t0", "s0"), ("t0", "t1"), ("s0", "s1")):
        study = numeric_commutativity(flows[a], flows[b], state)
        orders = ", ".join(f"{o:.2f}" for o in study.orders)
        print(f"  ({a},{b})  defects = {', '.join(f'{d:.1e}' for d in study.defects)}  orders = {orders}")

    print(f"\nBacklund defect for t0+s0: {numeric_backlund_check(state):.2e}")


if __name__ == "__main__":
    main()
