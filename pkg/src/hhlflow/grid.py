"""DC power flow model: network files, susceptance matrix, reduced system, flows.

Network files are JSON documents::

    {
      "base_mva": 100.0,
      "slack_bus": 1,
      "buses": [{"id": 1, "injection_mw": 20.0}, ...],
      "lines": [{"from": 1, "to": 2, "reactance_pu": 0.0125}, ...]
    }

Injections are net generation minus load in MW. Reactances are per-unit on
``base_mva``. Line susceptance is taken as ``1 / reactance_pu`` (resistance
neglected).
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import numerics

BALANCE_TOL_MW = 1e-6


class NetworkError(ValueError):
    """Invalid network description. ``path`` locates the offending field."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class Bus:
    id: int
    injection_mw: float


@dataclass(frozen=True)
class Line:
    from_bus: int
    to_bus: int
    reactance_pu: float

    @property
    def susceptance(self) -> float:
        return 1.0 / self.reactance_pu

    def key(self) -> frozenset:
        return frozenset((self.from_bus, self.to_bus))


@dataclass(frozen=True)
class Network:
    base_mva: float
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]
    slack_bus: int

    def __post_init__(self):
        validate(self)

    @property
    def bus_ids(self) -> list[int]:
        return [b.id for b in self.buses]

    def index_of(self, bus_id: int) -> int:
        return self.bus_ids.index(bus_id)

    def find_line(self, m: int, n: int) -> Line:
        key = frozenset((m, n))
        for line in self.lines:
            if line.key() == key:
                return line
        raise NetworkError(f"no line between buses {m} and {n}", "lines")

    def to_dict(self) -> dict:
        return {
            "base_mva": self.base_mva,
            "slack_bus": self.slack_bus,
            "buses": [{"id": b.id, "injection_mw": b.injection_mw} for b in self.buses],
            "lines": [
                {"from": ln.from_bus, "to": ln.to_bus, "reactance_pu": ln.reactance_pu}
                for ln in self.lines
            ],
        }


@dataclass(frozen=True)
class DcSystem:
    """Slack-reduced, rescaled DC power flow system ``reduced_b @ theta = rhs_p``.

    ``theta`` solved from this system is in scaled units; physical angles in
    radians are ``theta / matrix_scale``.
    """

    reduced_b: np.ndarray
    rhs_p: np.ndarray
    slack_bus: int
    matrix_scale: float
    bus_order: tuple[int, ...]  # reduced index -> bus id

    @property
    def dim(self) -> int:
        return len(self.rhs_p)

    def expand_angles(self, theta) -> dict[int, float]:
        """Map a reduced solution to every bus, slack included at 0 (scaled units)."""
        angles = {self.slack_bus: 0.0}
        for bus_id, value in zip(self.bus_order, np.asarray(theta, dtype=float)):
            angles[bus_id] = float(value)
        return angles


@dataclass(frozen=True)
class LineFlow:
    from_bus: int
    to_bus: int
    flow_pu: float
    flow_mw: float


@dataclass
class FlowReport:
    lines: list[LineFlow]
    angles: dict[int, float]  # radians
    base_mva: float
    injections_pu: dict[int, float] = field(default_factory=dict)

    def net_outflow_pu(self) -> dict[int, float]:
        out = {bus: 0.0 for bus in self.angles}
        for f in self.lines:
            out[f.from_bus] += f.flow_pu
            out[f.to_bus] -= f.flow_pu
        return out

    def max_imbalance_pu(self) -> float:
        out = self.net_outflow_pu()
        return max(abs(out[b] - self.injections_pu.get(b, 0.0)) for b in out)

    def flow(self, m: int, n: int) -> float:
        """Flow from ``m`` to ``n`` in per-unit."""
        for f in self.lines:
            if (f.from_bus, f.to_bus) == (m, n):
                return f.flow_pu
            if (f.from_bus, f.to_bus) == (n, m):
                return -f.flow_pu
        raise KeyError((m, n))


def validate(net: Network) -> None:
    if not (isinstance(net.base_mva, (int, float)) and net.base_mva > 0):
        raise NetworkError("base_mva must be a positive number", "base_mva")
    if not net.buses:
        raise NetworkError("at least one bus is required", "buses")
    ids = [b.id for b in net.buses]
    seen = set()
    for i, bus_id in enumerate(ids):
        if bus_id in seen:
            raise NetworkError(f"duplicate bus id {bus_id}", f"buses[{i}].id")
        seen.add(bus_id)
    if net.slack_bus not in seen:
        raise NetworkError(f"slack bus {net.slack_bus} is not in the bus list", "slack_bus")
    pairs = set()
    for i, line in enumerate(net.lines):
        where = f"lines[{i}]"
        for end, bus_id in (("from", line.from_bus), ("to", line.to_bus)):
            if bus_id not in seen:
                raise NetworkError(f"unknown bus {bus_id}", f"{where}.{end}")
        if line.from_bus == line.to_bus:
            raise NetworkError("self-loop", where)
        if not line.reactance_pu > 0:
            raise NetworkError("non-positive reactance", f"{where}.reactance_pu")
        if line.key() in pairs:
            raise NetworkError(
                f"parallel line between {line.from_bus} and {line.to_bus}", where
            )
        pairs.add(line.key())
    total = sum(b.injection_mw for b in net.buses)
    if abs(total) > BALANCE_TOL_MW:
        raise NetworkError(f"injection imbalance: net injections sum to {total:.6g} MW", "buses")
    if not _connected(ids, net.lines):
        raise NetworkError("network graph is disconnected", "lines")


def _connected(ids, lines) -> bool:
    adj = {i: [] for i in ids}
    for ln in lines:
        adj[ln.from_bus].append(ln.to_bus)
        adj[ln.to_bus].append(ln.from_bus)
    start = ids[0]
    seen = {start}
    queue = deque([start])
    while queue:
        for nb in adj[queue.popleft()]:
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return len(seen) == len(ids)


def _require(obj: dict, key: str, path: str):
    if not isinstance(obj, dict) or key not in obj:
        raise NetworkError("missing field", f"{path}.{key}" if path else key)
    return obj[key]


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise NetworkError(f"expected a number, got {value!r}", path)
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise NetworkError(f"expected an integer, got {value!r}", path)
    return value


def network_from_dict(doc: dict) -> Network:
    if not isinstance(doc, dict):
        raise NetworkError("top level must be an object")
    base = _number(_require(doc, "base_mva", ""), "base_mva")
    slack = _integer(_require(doc, "slack_bus", ""), "slack_bus")
    raw_buses = _require(doc, "buses", "")
    raw_lines = _require(doc, "lines", "")
    if not isinstance(raw_buses, list):
        raise NetworkError("expected an array", "buses")
    if not isinstance(raw_lines, list):
        raise NetworkError("expected an array", "lines")
    buses = []
    for i, b in enumerate(raw_buses):
        p = f"buses[{i}]"
        buses.append(
            Bus(
                _integer(_require(b, "id", p), f"{p}.id"),
                _number(_require(b, "injection_mw", p), f"{p}.injection_mw"),
            )
        )
    lines = []
    for i, ln in enumerate(raw_lines):
        p = f"lines[{i}]"
        lines.append(
            Line(
                _integer(_require(ln, "from", p), f"{p}.from"),
                _integer(_require(ln, "to", p), f"{p}.to"),
                _number(_require(ln, "reactance_pu", p), f"{p}.reactance_pu"),
            )
        )
    return Network(base, tuple(buses), tuple(lines), slack)


def parse_network(text: str | bytes) -> Network:
    """Parse and validate a JSON network document."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkError(f"malformed JSON: {exc}") from exc
    return network_from_dict(doc)


def load_network(path: str | Path) -> Network:
    """Load a network from a file path, or by name from the bundled networks.

    ``three_bus``, ``examples/three_bus`` and ``networks/three_bus.json`` all
    resolve to the bundled three-bus test system when no such file exists.
    """
    p = Path(path)
    for candidate in (p, p.with_suffix(".json")):
        if candidate.is_file():
            return parse_network(candidate.read_bytes())
    bundled = resources.files("hhlflow") / "networks" / f"{p.stem}.json"
    if bundled.is_file():
        return parse_network(bundled.read_bytes())
    raise FileNotFoundError(f"network file not found: {path}")


def build_b_matrix(net: Network) -> np.ndarray:
    """Full bus susceptance matrix (a weighted graph Laplacian)."""
    n = len(net.buses)
    b = np.zeros((n, n))
    for line in net.lines:
        i, j = net.index_of(line.from_bus), net.index_of(line.to_bus)
        s = line.susceptance
        b[i, j] -= s
        b[j, i] -= s
        b[i, i] += s
        b[j, j] += s
    return b


def _power_of_ten_floor(x: float) -> float:
    e = math.floor(math.log10(x))
    # guard against log10 rounding just below an exact power
    if 10.0 ** (e + 1) <= x:
        e += 1
    return 10.0**e


def reduce_and_scale(b: np.ndarray, net: Network) -> DcSystem:
    """Drop the slack row/column, convert injections to per-unit, factor out a power of ten."""
    k = net.index_of(net.slack_bus)
    keep = [i for i in range(len(net.buses)) if i != k]
    if not keep:
        raise NetworkError("network has only the slack bus; nothing to solve", "buses")
    reduced = np.asarray(b, dtype=float)[np.ix_(keep, keep)]
    scale = _power_of_ten_floor(float(np.max(np.abs(np.diag(reduced)))))
    reduced = reduced / scale
    try:
        numerics.solve_direct(reduced, np.zeros(len(keep)))
    except numerics.SingularMatrixError as exc:
        raise NetworkError("disconnected after slack removal") from exc
    rhs = np.array([net.buses[i].injection_mw / net.base_mva for i in keep])
    return DcSystem(
        reduced_b=reduced,
        rhs_p=rhs,
        slack_bus=net.slack_bus,
        matrix_scale=scale,
        bus_order=tuple(net.buses[i].id for i in keep),
    )


def dc_system(net: Network) -> DcSystem:
    return reduce_and_scale(build_b_matrix(net), net)


def solve_classical(sys: DcSystem) -> np.ndarray:
    """Reduced angle vector in scaled units (slack excluded)."""
    return numerics.solve_direct(sys.reduced_b, sys.rhs_p)


def line_flows(net: Network, angles: dict[int, float], matrix_scale: float) -> FlowReport:
    """Per-line flows from per-bus angles given in scaled units."""
    phys = {bus: angles.get(bus, 0.0) / matrix_scale for bus in net.bus_ids}
    flows = []
    for line in net.lines:
        pu = line.susceptance * (phys[line.from_bus] - phys[line.to_bus])
        flows.append(LineFlow(line.from_bus, line.to_bus, pu, pu * net.base_mva))
    return FlowReport(
        lines=flows,
        angles=phys,
        base_mva=net.base_mva,
        injections_pu={b.id: b.injection_mw / net.base_mva for b in net.buses},
    )


def solve_network(net: Network) -> tuple[DcSystem, np.ndarray, FlowReport]:
    """Classical DC power flow end to end."""
    sys = dc_system(net)
    theta = solve_classical(sys)
    return sys, theta, line_flows(net, sys.expand_angles(theta), sys.matrix_scale)


def random_network(rng: np.random.Generator, n_buses: int, extra_lines: int | None = None) -> Network:
    """Random connected network: a random spanning tree plus optional extra lines."""
    ids = list(range(1, n_buses + 1))
    order = rng.permutation(ids).tolist()
    pairs = set()
    for k in range(1, n_buses):
        parent = order[int(rng.integers(0, k))]
        pairs.add(frozenset((order[k], parent)))
    candidates = [
        frozenset((i, j)) for i in ids for j in ids if i < j and frozenset((i, j)) not in pairs
    ]
    if extra_lines is None:
        extra_lines = int(rng.integers(0, len(candidates) + 1))
    for idx in rng.permutation(len(candidates))[:extra_lines]:
        pairs.add(candidates[int(idx)])
    lines = tuple(
        Line(min(p), max(p), float(rng.uniform(0.01, 0.2))) for p in sorted(pairs, key=sorted)
    )
    inj = rng.uniform(-100.0, 100.0, size=n_buses)
    inj -= inj.mean()
    inj[-1] = -float(np.sum(inj[:-1]))
    buses = tuple(Bus(i, float(p)) for i, p in zip(ids, inj))
    return Network(100.0, buses, lines, slack_bus=int(rng.choice(ids)))
