"""Dense statevector simulator.

Conventions
-----------
* Qubit 0 is the least significant bit of the basis-state index.
* Bitstrings are printed most significant qubit first, so ``"01"`` on a
  two-qubit register means qubit 0 is 1.
* A gate matrix acting on targets ``(t0, t1, ...)`` uses ``t0`` as the least
  significant bit of its own row/column index.

States are at most 16 qubits. :func:`count_resources` decomposes composite
operations with the fixed rules in :func:`decompose` and reports width, ASAP
depth and the number of two-qubit gates.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 16
NORM_TOL = 1e-10

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)

KINDS = ("H", "X", "RY", "CNOT", "U", "QFT", "IQFT", "PREP")


class PostselectionError(ValueError):
    pass


def ry_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def qft_matrix(n: int, inverse: bool = False) -> np.ndarray:
    dim = 2**n
    sign = -1.0 if inverse else 1.0
    k = np.arange(dim)
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / dim) / np.sqrt(dim)


def prep_unitary(amplitudes) -> np.ndarray:
    """A unitary whose first column is ``amplitudes`` (Householder construction)."""
    a = np.asarray(amplitudes, dtype=complex).reshape(-1)
    dim = a.size
    if dim & (dim - 1) or dim == 0:
        raise ValueError(f"amplitude count {dim} is not a power of two")
    norm = np.linalg.norm(a)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"amplitudes must be normalized, got norm {norm}")
    phase = a[0] / abs(a[0]) if abs(a[0]) > 1e-15 else 1.0
    e0 = np.zeros(dim, dtype=complex)
    e0[0] = phase
    w = a - e0
    ww = np.vdot(w, w).real
    if ww < 1e-30:
        return phase * np.eye(dim, dtype=complex)
    p = np.eye(dim, dtype=complex) - 2.0 * np.outer(w, w.conj()) / ww
    return phase * p


@dataclass(frozen=True, eq=False)
class GateOp:
    """One circuit operation.

    ``kind`` is one of ``H, X, RY, CNOT, U, QFT, IQFT, PREP``. ``RY`` and ``U``
    may carry controls (a controlled ``RY`` is the controlled rotation, a
    controlled ``U`` is the controlled unitary). ``PREP`` loads ``amplitudes``
    into targets assumed to start in ``|0...0>``; it is simulated as the
    Householder unitary from :func:`prep_unitary`.
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    angle: float | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)
    power: int | None = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if not self.targets:
            raise ValueError(f"{self.kind} needs at least one target")
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{self.kind}: targets and controls must be distinct, got {qubits}")
        if self.kind in ("H", "X", "RY", "CNOT") and len(self.targets) != 1:
            raise ValueError(f"{self.kind} acts on exactly one target")
        if self.kind == "CNOT" and len(self.controls) != 1:
            raise ValueError("CNOT needs exactly one control")
        if self.kind in ("H", "X", "QFT", "IQFT", "PREP") and self.controls:
            raise ValueError(f"{self.kind} does not take controls")
        if self.kind == "RY" and self.angle is None:
            raise ValueError("RY needs an angle")
        if self.kind in ("U", "PREP"):
            if self.matrix is None:
                raise ValueError(f"{self.kind} needs a matrix")
            m = np.asarray(self.matrix, dtype=complex)
            if self.kind == "PREP":
                m = m.reshape(-1)
                if m.size != 2 ** len(self.targets):
                    raise ValueError("PREP amplitude count does not match target count")
                prep_unitary(m)
            else:
                dim = 2 ** len(self.targets)
                if m.shape != (dim, dim):
                    raise ValueError(f"U matrix shape {m.shape} does not match {len(self.targets)} targets")
                if not np.allclose(m.conj().T @ m, np.eye(dim), atol=1e-10, rtol=0):
                    raise ValueError("U matrix is not unitary")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def unitary(self) -> np.ndarray:
        """Matrix on the targets only (controls excluded)."""
        if self.kind == "H":
            return _H
        if self.kind in ("X", "CNOT"):
            return _X
        if self.kind == "RY":
            return ry_matrix(self.angle)
        if self.kind == "U":
            return self.matrix
        if self.kind == "QFT":
            return qft_matrix(len(self.targets))
        if self.kind == "IQFT":
            return qft_matrix(len(self.targets), inverse=True)
        return prep_unitary(self.matrix)

    def inverse(self) -> "GateOp":
        if self.kind in ("H", "X", "CNOT"):
            return self
        if self.kind == "RY":
            return GateOp("RY", self.targets, self.controls, angle=-self.angle, label=self.label)
        if self.kind == "QFT":
            return GateOp("IQFT", self.targets, label=self.label)
        if self.kind == "IQFT":
            return GateOp("QFT", self.targets, label=self.label)
        u = self.unitary().conj().T
        return GateOp("U", self.targets, self.controls, matrix=u, power=self.power, label=self.label + "^-1" if self.label else "")


# constructors, for readability at call sites
def h(q):
    return GateOp("H", (q,))


def x(q):
    return GateOp("X", (q,))


def ry(q, angle, controls=()):
    return GateOp("RY", (q,), tuple(controls), angle=float(angle))


def cnot(control, target):
    return GateOp("CNOT", (target,), (control,))


def unitary(targets, matrix, controls=(), power=None, label=""):
    return GateOp("U", tuple(targets), tuple(controls), matrix=matrix, power=power, label=label)


def qft(targets, inverse=False):
    return GateOp("IQFT" if inverse else "QFT", tuple(targets))


def prep(targets, amplitudes):
    return GateOp("PREP", tuple(targets), matrix=np.asarray(amplitudes, dtype=complex))


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if a.size != 2**self.n_qubits:
            raise ValueError(f"expected {2**self.n_qubits} amplitudes, got {a.size}")
        norm = np.vdot(a, a).real
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm})")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        a = np.zeros(2**n_qubits, dtype=complex)
        a[0] = 1.0
        return cls(n_qubits, a)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        a = np.zeros(2**n_qubits, dtype=complex)
        a[index] = 1.0
        return cls(n_qubits, a)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def _check_qubits(n: int, qubits) -> None:
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for a {n}-qubit state")


def _apply_matrix(amps: np.ndarray, n: int, matrix: np.ndarray, targets, controls) -> np.ndarray:
    psi = amps.reshape((2,) * n)
    axis = lambda q: n - 1 - q  # noqa: E731
    idx = [slice(None)] * n
    for c in controls:
        idx[axis(c)] = 1
    idx = tuple(idx)
    sub = psi[idx]
    ctrl_axes = {axis(c) for c in controls}
    pos = {a: i for i, a in enumerate(a for a in range(n) if a not in ctrl_axes)}
    m = len(targets)
    mt = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * m))
    state_axes = [pos[axis(targets[j])] for j in reversed(range(m))]
    res = np.tensordot(mt, sub, axes=(list(range(m, 2 * m)), state_axes))
    res = np.moveaxis(res, list(range(m)), state_axes)
    out = psi.copy()
    out[idx] = res
    return out.reshape(-1)


def apply(state: StateVector, op: GateOp) -> StateVector:
    _check_qubits(state.n_qubits, op.qubits)
    amps = _apply_matrix(state.amplitudes, state.n_qubits, op.unitary(), op.targets, op.controls)
    return StateVector(state.n_qubits, amps)


def apply_qft(state: StateVector, register: range | tuple[int, ...], inverse: bool = False) -> StateVector:
    return apply(state, qft(tuple(register), inverse=inverse))


def marginal(state: StateVector, qubits) -> np.ndarray:
    """Probabilities of the register formed by ``qubits`` (``qubits[0]`` is its LSB)."""
    _check_qubits(state.n_qubits, qubits)
    n = state.n_qubits
    p = state.probabilities().reshape((2,) * n)
    keep = [n - 1 - q for q in reversed(qubits)]
    others = tuple(a for a in range(n) if a not in keep)
    p = p.sum(axis=others)
    # remaining axes are in increasing axis order; reorder to MSB..LSB of the register
    order = sorted(keep)
    p = np.transpose(p, [order.index(a) for a in keep])
    return p.reshape(-1)


def probability_of(state: StateVector, qubit: int, outcome: int) -> float:
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    return float(marginal(state, (qubit,))[outcome])


def postselect(state: StateVector, qubit: int, outcome: int) -> tuple[StateVector, float]:
    """Collapse ``qubit`` onto ``outcome``; returns the renormalized state and its Born probability."""
    prob = probability_of(state, qubit, outcome)
    if prob <= 1e-12:
        raise PostselectionError(
            f"post-selection impossible: P(qubit {qubit} = {outcome}) = {prob:.3e}"
        )
    idx = np.arange(2**state.n_qubits)
    amps = np.where(((idx >> qubit) & 1) == outcome, state.amplitudes, 0.0)
    return StateVector(state.n_qubits, amps / np.sqrt(prob)), prob


def bitstring(value: int, width: int) -> str:
    return format(value, f"0{width}b")


def sample(state: StateVector, shots: int, seed: int | None = None) -> dict[str, int]:
    """Histogram of full-register bitstrings drawn from the Born distribution."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = state.probabilities()
    p = p / p.sum()
    counts = np.random.default_rng(seed).multinomial(shots, p)
    return {bitstring(i, state.n_qubits): int(c) for i, c in enumerate(counts) if c}


def run_ops(ops, state: StateVector) -> StateVector:
    for op in ops:
        state = apply(state, op)
    return state


@dataclass
class Circuit:
    n_qubits: int
    registers: dict[str, tuple[int, int]] = field(default_factory=dict)  # name -> (start, size)
    ops: list[GateOp] = field(default_factory=list)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"circuit width {self.n_qubits} outside [1, {MAX_QUBITS}]")
        for name, (start, size) in self.registers.items():
            if start < 0 or size < 1 or start + size > self.n_qubits:
                raise ValueError(f"register {name} = ({start}, {size}) does not fit")

    def qubits(self, name: str) -> tuple[int, ...]:
        start, size = self.registers[name]
        return tuple(range(start, start + size))

    def add(self, *ops: GateOp) -> "Circuit":
        for op in ops:
            _check_qubits(self.n_qubits, op.qubits)
            self.ops.append(op)
        return self

    def extend(self, ops) -> "Circuit":
        return self.add(*ops)

    def run(self, state: StateVector | None = None) -> StateVector:
        return run_ops(self.ops, state or StateVector.zero(self.n_qubits))

    def name_of(self, q: int) -> str:
        for name, (start, size) in self.registers.items():
            if start <= q < start + size:
                return f"{name}[{q - start}]"
        return f"q{q}"

    def dump(self) -> str:
        """Stable one-line-per-op listing with register names."""
        lines = [f"circuit width={self.n_qubits}"]
        for name, (start, size) in self.registers.items():
            lines.append(f"register {name} q{start}..q{start + size - 1}")
        for i, op in enumerate(self.ops):
            parts = [f"{i:4d} {op.kind}"]
            if op.kind == "U" and op.label:
                parts[0] += f"[{op.label}]"
            if op.power is not None:
                parts.append(f"pow=2^{op.power}")
            if op.angle is not None:
                parts.append(f"angle={op.angle:+.9f}")
            if op.controls:
                parts.append("ctrl=" + ",".join(self.name_of(q) for q in op.controls))
            parts.append("tgt=" + ",".join(self.name_of(q) for q in op.targets))
            if op.kind == "PREP":
                parts.append("amp=" + ",".join(_fmt_complex(a) for a in op.matrix))
            lines.append(" ".join(parts))
        return "\n".join(lines)


def _fmt_complex(z: complex) -> str:
    if abs(z.imag) < 1e-15:
        return f"{z.real:+.9f}"
    return f"({z.real:+.9f}{z.imag:+.9f}j)"


@dataclass(frozen=True)
class ResourceCount:
    width: int
    depth: int
    two_qubit_gates: int
    one_qubit_gates: int = 0

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "depth": self.depth,
            "two_qubit_gates": self.two_qubit_gates,
            "one_qubit_gates": self.one_qubit_gates,
        }


def _gray_cnot_ladder(controls, target) -> list[tuple[int, ...]]:
    """Uniformly/multi-controlled rotation via a Gray-code CNOT ladder: 2^k rotations, 2^k CNOTs."""
    k = len(controls)
    out = []
    for i in range(2**k):
        out.append((target,))
        changed = ((i + 1) & -(i + 1)).bit_length() - 1 if i + 1 < 2**k else k - 1
        out.append((controls[changed], target))
    return out


def _qsd_cnots(n: int) -> int:
    """CNOT count of the quantum Shannon decomposition of a generic n-qubit unitary."""
    return int(round((23 / 48) * 4**n - 1.5 * 2**n + 4 / 3))


def decompose(op: GateOp) -> list[tuple[int, ...]]:
    """Footprints of the elementary gates an op stands for.

    Rules (two-qubit gates are CNOTs):

    * ``H``, ``X``, uncontrolled ``RY``: one single-qubit gate.
    * ``CNOT``: one CNOT.
    * ``RY`` with k controls: Gray-code ladder, 2^k rotations and 2^k CNOTs
      (2 CNOTs for a singly controlled rotation).
    * ``U`` with one control and one target: A-CNOT-B-CNOT-C, 2 CNOTs.
    * any other ``U`` on n = controls + targets qubits: generic Shannon
      decomposition, ``23/48 4^n - 3/2 2^n + 4/3`` CNOTs, each preceded by a
      single-qubit gate. The power label does not change the count since the
      powered unitary is embedded directly.
    * ``QFT``/``IQFT`` on r qubits: r Hadamards, r(r-1)/2 controlled phases at
      2 CNOTs each, floor(r/2) swaps at 3 CNOTs each.
    * ``PREP`` on m qubits: one uniformly controlled Ry per level l with 2^l
      rotations and 2^l CNOTs for l >= 1; doubled with Rz levels when the
      amplitudes are not all real.
    """
    k = op.kind
    if k in ("H", "X"):
        return [op.targets]
    if k == "CNOT":
        return [op.controls + op.targets]
    if k == "RY":
        if not op.controls:
            return [op.targets]
        return _gray_cnot_ladder(op.controls, op.targets[0])
    if k == "U":
        qs = op.controls + op.targets
        if len(qs) == 1:
            return [qs]
        if len(op.controls) == 1 and len(op.targets) == 1:
            c, t = op.controls[0], op.targets[0]
            return [(t,), (c, t), (t,), (c, t), (t,), (c,)]
        out = []
        for i in range(_qsd_cnots(len(qs))):
            j = i % (len(qs) - 1)
            out.append((qs[j + 1],))
            out.append((qs[j], qs[j + 1]))
        return out
    if k in ("QFT", "IQFT"):
        qs = list(reversed(op.targets))
        out = []
        for i, q in enumerate(qs):
            out.append((q,))
            for c in qs[i + 1 :]:
                out += [(c, q), (q,), (c, q), (c,)]
        r = len(qs)
        for i in range(r // 2):
            a, b = qs[i], qs[r - 1 - i]
            out += [(a, b), (b, a), (a, b)]
        return out if k == "QFT" else list(reversed(out))
    # PREP
    t = op.targets
    m = len(t)
    amps = np.asarray(op.matrix)
    layers = 1 if np.allclose(amps.imag, 0.0, atol=1e-15) else 2
    out = []
    for _ in range(layers):
        for level in range(m):
            target = t[m - 1 - level]
            ctrls = tuple(t[m - level :])
            if level == 0:
                out.append((target,))
            else:
                out += _gray_cnot_ladder(ctrls, target)
    return out


def count_resources(c: Circuit) -> ResourceCount:
    level = [0] * c.n_qubits
    twoq = oneq = 0
    for op in c.ops:
        for fp in decompose(op):
            d = 1 + max(level[q] for q in fp)
            for q in fp:
                level[q] = d
            if len(fp) == 2:
                twoq += 1
            else:
                oneq += 1
    return ResourceCount(c.n_qubits, max(level) if level else 0, twoq, oneq)


def gate_histogram(c: Circuit) -> dict[str, int]:
    return dict(Counter(op.kind + ("c" * len(op.controls)) for op in c.ops))
