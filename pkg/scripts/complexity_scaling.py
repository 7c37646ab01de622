"""Plug-in classical vs quantum cost estimates as the bus count grows."""

import argparse

from hhlflow import hhl


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=float, default=4.0, help="row sparsity")
    ap.add_argument("--k", type=float, default=10.0, help="condition number")
    ap.add_argument("--eps", type=float, default=0.01)
    args = ap.parse_args()

    print(f"{'n':>10} {'classical':>14} {'quantum':>14} {'speedup':>10}")
    for exp in range(1, 9):
        e = hhl.estimate_complexity(10**exp, args.s, args.k, args.eps)
        print(f"{10**exp:10d} {e.classical_cost:14.4g} {e.quantum_cost:14.4g} {e.speedup:10.4g}")


if __name__ == "__main__":
    main()
