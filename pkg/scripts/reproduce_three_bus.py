"""Three-bus walkthrough: classical solve, QPE histogram, HHL run and line flows."""

import argparse
import json
import math

from hhlflow import flowmeter, grid, hhl


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--network", default="three_bus")
    ap.add_argument("--shots", type=int, default=None)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    net = grid.load_network(args.network)
    sys, theta, report = grid.solve_network(net)
    params = hhl.HhlParams(alpha=2, shots=args.shots, seed=args.seed)
    out = hhl.run(sys, params)
    hist = hhl.eigenphase_histogram(sys, hhl.HhlParams(alpha=2, t=out.t))

    print("reduced B:", sys.reduced_b.tolist(), "rhs:", sys.rhs_p.tolist())
    print("classical theta (scaled):", [round(float(v), 6) for v in theta])
    print(f"t = 2pi * {out.t / (2 * math.pi):.4f}, C = {out.c:.4f}")
    print("eigenphase histogram:", json.dumps(hist, sort_keys=True))
    print("hhl theta:", [round(float(v), 6) for v in out.solution], f"fidelity {out.fidelity:.9f}")
    print(f"P(ancilla=1) = {out.success_probability:.6f}, |theta|^2 = {out.norm_theta**2:.6f}")
    print("resources:", out.resources.to_dict())
    for ln in net.lines:
        f = flowmeter.measure_line_flow(net, (ln.from_bus, ln.to_bus), params)
        ref = report.flow(ln.from_bus, ln.to_bus) * net.base_mva
        print(f"line {ln.from_bus}-{ln.to_bus}: quantum {f.flow_mw:+8.3f} MW  classical {ref:+8.3f} MW")


if __name__ == "__main__":
    main()
