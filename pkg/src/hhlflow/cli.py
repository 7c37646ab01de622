"""Command-line front end.

Exit codes: 0 success, 2 bad flags, 3 unreadable or invalid network file,
4 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import flowmeter, grid, hhl, numerics, qsim

COMMANDS = ("solve-classical", "solve-hhl", "flow", "resources", "complexity", "compare")

EXIT_FLAGS, EXIT_FILE, EXIT_SOLVER = 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str | None = None
    alpha: int = 2
    t_override: float | None = None
    c_override: float | None = None
    shots: int | None = None
    seed: int | None = None
    output_format: str = "table"
    line: tuple[int, int] | None = None
    eps: float = 0.01
    n: float | None = None
    s: float | None = None
    k: float | None = None
    scale: float | None = None
    dump_circuit: bool = False

    def hhl_params(self) -> hhl.HhlParams:
        return hhl.HhlParams(self.alpha, self.t_override, self.c_override, self.shots, self.seed)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _FlagError(message)


class _FlagError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hhlflow", description="DC power flow, classically and with simulated HHL.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, network=True):
        if network:
            p.add_argument("network", help="network JSON file, or the name of a bundled network")
        p.add_argument("--format", dest="output_format", choices=("table", "json"), default="table")

    def quantum(p):
        p.add_argument("--alpha", type=int, default=2, help="eigenvalue register qubits")
        p.add_argument("--t", dest="t_override", type=float, help="evolution time override")
        p.add_argument("--c", dest="c_override", type=float, help="rotation constant override")
        p.add_argument("--shots", type=int, help="sample with this many shots (default: exact)")
        p.add_argument("--seed", type=int, default=None)

    common(sub.add_parser("solve-classical", help="direct linear solve"))
    p = sub.add_parser("solve-hhl", help="simulated HHL solve")
    common(p)
    quantum(p)
    p.add_argument("--dump-circuit", action="store_true")
    p = sub.add_parser("flow", help="line flow through the Hadamard readout")
    common(p)
    quantum(p)
    p.add_argument("--line", nargs=2, type=int, required=True, metavar=("FROM", "TO"))
    p = sub.add_parser("resources", help="HHL circuit width, depth, two-qubit gates")
    common(p)
    quantum(p)
    p.add_argument("--dump-circuit", action="store_true")
    p = sub.add_parser("complexity", help="classical vs HHL asymptotic cost")
    p.add_argument("network", nargs="?", default=None)
    p.add_argument("--format", dest="output_format", choices=("table", "json"), default="table")
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--n", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--k", type=float)
    p.add_argument("--scale", type=float, help="also report cost ratios for n -> scale * n")
    p = sub.add_parser("compare", help="classical and HHL solutions side by side")
    common(p)
    quantum(p)
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    d = vars(ns)
    cfg = RunConfig(
        command=d["command"],
        input_path=d.get("network"),
        alpha=d.get("alpha", 2),
        t_override=d.get("t_override"),
        c_override=d.get("c_override"),
        shots=d.get("shots"),
        seed=d.get("seed"),
        output_format=d["output_format"],
        line=tuple(d["line"]) if d.get("line") else None,
        eps=d.get("eps", 0.01),
        n=d.get("n"),
        s=d.get("s"),
        k=d.get("k"),
        scale=d.get("scale"),
        dump_circuit=d.get("dump_circuit", False),
    )
    if cfg.command != "complexity":
        try:
            cfg.hhl_params()
        except ValueError as exc:
            raise _FlagError(str(exc)) from exc
    elif cfg.input_path is None and None in (cfg.n, cfg.s, cfg.k):
        raise _FlagError("complexity needs a network or all of --n, --s, --k")
    return cfg


def _floats(v) -> list[float]:
    return [float(x) for x in np.asarray(v).reshape(-1)]


def _angles(sys: grid.DcSystem, theta) -> dict:
    scaled = sys.expand_angles(theta)
    return {
        "angles_scaled": {str(b): v for b, v in sorted(scaled.items())},
        "angles_rad": {str(b): v / sys.matrix_scale for b, v in sorted(scaled.items())},
    }


def _flows(report: grid.FlowReport) -> list[dict]:
    return [
        {"from": f.from_bus, "to": f.to_bus, "flow_pu": f.flow_pu, "flow_mw": f.flow_mw}
        for f in report.lines
    ]


def _system(sys: grid.DcSystem) -> dict:
    return {
        "reduced_b": [_floats(row) for row in sys.reduced_b],
        "rhs_p": _floats(sys.rhs_p),
        "slack_bus": sys.slack_bus,
        "matrix_scale": sys.matrix_scale,
        "bus_order": list(sys.bus_order),
    }


def cmd_solve_classical(cfg: RunConfig, net: grid.Network) -> dict:
    sys, theta, flows = grid.solve_network(net)
    return {
        "command": cfg.command,
        "system": _system(sys),
        "solution": _floats(theta),
        **_angles(sys, theta),
        "flows": _flows(flows),
    }


def cmd_solve_hhl(cfg: RunConfig, net: grid.Network) -> dict:
    sys = grid.dc_system(net)
    out = hhl.run(sys, cfg.hhl_params())
    flows = grid.line_flows(net, sys.expand_angles(out.solution), sys.matrix_scale)
    report = {
        "command": cfg.command,
        "system": _system(sys),
        "outcome": {**out.to_dict(), "counts": dict(sorted(out.counts.items()))},
        **_angles(sys, out.solution),
        "flows": _flows(flows),
    }
    if cfg.dump_circuit:
        report["circuit"] = hhl.build_circuit(sys, cfg.hhl_params()).dump()
    return report


def cmd_flow(cfg: RunConfig, net: grid.Network) -> dict:
    est = flowmeter.measure_line_flow(net, cfg.line, cfg.hhl_params())
    sys, _, classical = grid.solve_network(net)
    return {
        "command": cfg.command,
        "estimate": est.to_dict(),
        "classical_flow_pu": classical.flow(*cfg.line),
        "classical_flow_mw": classical.flow(*cfg.line) * net.base_mva,
        "matrix_scale": sys.matrix_scale,
        "seed": cfg.seed,
    }


def cmd_resources(cfg: RunConfig, net: grid.Network) -> dict:
    circ = hhl.build_circuit(grid.dc_system(net), cfg.hhl_params())
    report = {
        "command": cfg.command,
        "resources": qsim.count_resources(circ).to_dict(),
        "registers": {k: list(v) for k, v in circ.registers.items()},
        "ops": len(circ.ops),
    }
    if cfg.dump_circuit:
        report["circuit"] = circ.dump()
    return report


def cmd_complexity(cfg: RunConfig, net: grid.Network | None) -> dict:
    if net is not None:
        est = hhl.complexity_for(grid.dc_system(net), cfg.eps)
        n = cfg.n or est.n
        s = cfg.s or est.s
        k = cfg.k or est.k
    else:
        n, s, k = cfg.n, cfg.s, cfg.k
    est = hhl.estimate_complexity(n, s, k, cfg.eps)
    report = {"command": cfg.command, "estimate": est.to_dict()}
    if cfg.scale:
        big = hhl.estimate_complexity(n * cfg.scale, s, k, cfg.eps)
        report["scaled"] = {
            "factor": cfg.scale,
            "estimate": big.to_dict(),
            "classical_ratio": big.classical_cost / est.classical_cost,
            "quantum_ratio": big.quantum_cost / est.quantum_cost if est.quantum_cost else None,
        }
    return report


def cmd_compare(cfg: RunConfig, net: grid.Network) -> dict:
    sys, theta, _ = grid.solve_network(net)
    out = hhl.run(sys, cfg.hhl_params())
    return {
        "command": cfg.command,
        "classical_solution": _floats(theta),
        "quantum_solution": _floats(out.solution),
        "max_abs_difference": float(np.max(np.abs(out.solution - theta))),
        "fidelity": out.fidelity,
        "success_probability": out.success_probability,
        "norm_theta_sq": out.norm_theta**2,
        "resources": out.resources.to_dict(),
        "t": out.t,
        "c": out.c,
        "alpha": out.alpha,
        "mode": out.mode,
    }


HANDLERS = {
    "solve-classical": cmd_solve_classical,
    "solve-hhl": cmd_solve_hhl,
    "flow": cmd_flow,
    "resources": cmd_resources,
    "complexity": cmd_complexity,
    "compare": cmd_compare,
}


def emit(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    return _table(report)


def _table(report: dict, prefix: str = "") -> str:
    lines = []
    for key, value in report.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict) and value and key != "eigenphase_histogram":
            lines.append(_table(value, prefix=name + "."))
        elif isinstance(value, str) and "\n" in value:
            lines.append(f"{name}:")
            lines.append(value)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            for item in value:
                lines.append(f"{name}: " + "  ".join(f"{k}={_fmt(v)}" for k, v in item.items()))
        else:
            lines.append(f"{name:<34} {_fmt(value)}")
    return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt(x)}" for k, x in v.items()) + "}"
    return str(v)


def execute(cfg: RunConfig) -> dict:
    net = grid.load_network(cfg.input_path) if cfg.input_path else None
    return HANDLERS[cfg.command](cfg, net)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except _FlagError as exc:
        print(f"hhlflow: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        net = grid.load_network(cfg.input_path) if cfg.input_path else None
    except (OSError, grid.NetworkError) as exc:
        print(f"hhlflow: file error: {exc}", file=sys.stderr)
        return EXIT_FILE
    try:
        report = HANDLERS[cfg.command](cfg, net)
    except (ValueError, RuntimeError, numerics.SingularMatrixError) as exc:
        print(f"hhlflow: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    print(emit(report, cfg.output_format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
