"""Fidelity and success probability versus clock-register width."""

import argparse

import numpy as np

from hhlflow import grid, hhl


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--network", default="three_bus")
    ap.add_argument("--buses", type=int, default=0, help="use a random network of this size instead")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-alpha", type=int, default=7)
    args = ap.parse_args()

    if args.buses:
        net = grid.random_network(np.random.default_rng(args.seed), args.buses)
    else:
        net = grid.load_network(args.network)
    sys = grid.dc_system(net)
    print(f"{'alpha':>5} {'width':>5} {'depth':>6} {'2q':>6} {'fidelity':>12} {'P_success':>10}")
    for alpha in range(1, args.max_alpha + 1):
        out = hhl.run(sys, hhl.HhlParams(alpha=alpha))
        r = out.resources
        print(f"{alpha:5d} {r.width:5d} {r.depth:6d} {r.two_qubit_gates:6d} {out.fidelity:12.9f} {out.success_probability:10.6f}")


if __name__ == "__main__":
    main()
