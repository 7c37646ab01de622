"""HHL linear solver, simulated on the dense statevector backend.

Register layout from the least significant qubit: ``beta`` (solution), then
``alpha`` (eigenvalue estimate), then one ``ancilla``. The circuit is

    PREP(beta) . QPE(alpha, beta; U = exp(iBt)) . rotations . QPE^-1

and the ancilla is post-selected on 1 during execution. QPE writes
``round(2**alpha * lambda * t / 2pi)`` into alpha, so register value ``v``
decodes to the eigenvalue ``v * 2pi / (t * 2**alpha)``. The rotation keyed on
``v`` is ``Ry(2 asin(C / lambda(v)))`` controlled on all alpha qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import grid, numerics, qsim

MAX_BETA = 4


@dataclass(frozen=True)
class HhlParams:
    alpha: int = 2
    t: float | None = None  # None: choose_time
    c: float | None = None  # None: choose_c
    shots: int | None = None  # None: exact mode
    seed: int | None = None

    def __post_init__(self):
        if not 1 <= self.alpha <= 8:
            raise ValueError(f"alpha must be in [1, 8], got {self.alpha}")
        if self.t is not None and not self.t > 0:
            raise ValueError(f"t must be positive, got {self.t}")
        if self.c is not None and not self.c > 0:
            raise ValueError(f"C must be positive, got {self.c}")
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"shots must be positive, got {self.shots}")

    @property
    def mode(self) -> str:
        return "exact" if self.shots is None else "sampled"


@dataclass
class HhlOutcome:
    solution: np.ndarray  # signed theta estimate, scaled units
    norm_theta: float
    success_probability: float
    fidelity: float
    resources: qsim.ResourceCount
    eigenphase_histogram: dict[str, float]
    t: float
    c: float
    alpha: int
    eigenvalues: np.ndarray
    classical_solution: np.ndarray
    normalized_solution: np.ndarray  # post-selected beta amplitudes (unit norm)
    alpha_residual: float  # P(alpha != 0 | ancilla = 1) after uncompute
    renorm: float
    mode: str = "exact"
    shots: int | None = None
    seed: int | None = None
    oracle_assisted_signs: bool = False
    counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "solution": [float(v) for v in self.solution],
            "norm_theta": self.norm_theta,
            "norm_theta_sq": self.norm_theta**2,
            "success_probability": self.success_probability,
            "fidelity": self.fidelity,
            "resources": self.resources.to_dict(),
            "eigenphase_histogram": dict(self.eigenphase_histogram),
            "t": self.t,
            "c": self.c,
            "alpha": self.alpha,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "classical_solution": [float(v) for v in self.classical_solution],
            "normalized_solution": [float(v) for v in self.normalized_solution],
            "alpha_residual": self.alpha_residual,
            "renorm": self.renorm,
            "mode": self.mode,
            "shots": self.shots,
            "seed": self.seed,
            "oracle_assisted_signs": self.oracle_assisted_signs,
        }


@dataclass(frozen=True)
class ComplexityEstimate:
    n: float
    s: float
    k: float
    eps: float
    classical_cost: float
    quantum_cost: float

    @property
    def speedup(self) -> float:
        return self.classical_cost / self.quantum_cost if self.quantum_cost else math.inf

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "s": self.s,
            "k": self.k,
            "eps": self.eps,
            "classical_cost": self.classical_cost,
            "quantum_cost": self.quantum_cost,
        }


def choose_time(eigs, alpha: int) -> float:
    """Evolution time mapping the largest eigenvalue to phase (2^alpha - 1) / 2^alpha."""
    eigs = np.asarray(eigs, dtype=float)
    if eigs.size == 0 or np.any(eigs <= 0):
        raise ValueError(f"all eigenvalues must be positive, got {eigs}")
    top = (2**alpha - 1) / 2**alpha
    return 2 * math.pi * top / float(eigs.max())


def choose_c(eigs, t: float, alpha: int) -> float:
    """Rotation constant.

    ``C = t / 2pi``, which undoes the eigenvalue rescaling applied by ``t``, as
    long as it does not exceed the smallest eigenvalue. Otherwise
    ``0.9 * min(eigs)``.
    """
    lam_min = float(np.min(eigs))
    c = t / (2 * math.pi)
    if c <= lam_min * (1 + 1e-12):
        return c
    return 0.9 * lam_min


def decoded_eigenvalue(v: int, t: float, alpha: int) -> float:
    return v * 2 * math.pi / (t * 2**alpha)


def rotation_angle(v: int, t: float, c: float, alpha: int) -> float:
    ratio = min(1.0, c / decoded_eigenvalue(v, t, alpha))
    return 2 * math.asin(ratio)


def _beta_width(dim: int) -> int:
    return max(1, (dim - 1).bit_length())


def padded_system(sys: grid.DcSystem) -> tuple[np.ndarray, np.ndarray]:
    """Pad (B, p) to a power-of-two dimension.

    The padded block is ``lambda_max * I`` with zero right-hand side, so it
    decouples from the solution and leaves the eigenvalue range unchanged.
    """
    b = np.asarray(sys.reduced_b, dtype=float)
    p = np.asarray(sys.rhs_p, dtype=float)
    dim = len(p)
    nb = _beta_width(dim)
    if nb > MAX_BETA:
        raise ValueError(f"system dimension {dim} exceeds the register budget (max {2**MAX_BETA})")
    full = 2**nb
    if full == dim:
        return b, p
    fill = float(numerics.eigh(b).eigenvalues.max())
    bp = np.eye(full) * fill
    bp[:dim, :dim] = b
    pp = np.zeros(full)
    pp[:dim] = p
    return bp, pp


def prepare_rhs(sys: grid.DcSystem) -> tuple[qsim.StateVector, float]:
    """Amplitude-encode the (zero-padded) right-hand side."""
    _, p = padded_system(sys)
    renorm = float(np.linalg.norm(p))
    if renorm == 0.0:
        raise ValueError("right-hand side is zero; nothing to encode")
    nb = _beta_width(len(p))
    return qsim.StateVector(nb, p / renorm), renorm


@dataclass(frozen=True)
class _Setup:
    b: np.ndarray
    p: np.ndarray
    eigs: np.ndarray
    t: float
    c: float
    alpha: int
    n_beta: int


def _setup(sys: grid.DcSystem, params: HhlParams) -> _Setup:
    b, p = padded_system(sys)
    eigs = numerics.eigh(b).eigenvalues
    if np.any(eigs <= 0):
        raise ValueError(f"system matrix must be positive definite; eigenvalues {eigs}")
    t = params.t if params.t is not None else choose_time(eigs, params.alpha)
    c = params.c if params.c is not None else choose_c(eigs, t, params.alpha)
    if not np.linalg.norm(p) > 0:
        raise ValueError("right-hand side is zero; nothing to encode")
    return _Setup(b, p, eigs, t, c, params.alpha, _beta_width(len(p)))


def _registers(n_beta: int, alpha: int) -> dict[str, tuple[int, int]]:
    return {"beta": (0, n_beta), "alpha": (n_beta, alpha), "ancilla": (n_beta + alpha, 1)}


def _qpe_ops(b, t, alpha_q, beta_q) -> list[qsim.GateOp]:
    ops = [qsim.h(q) for q in alpha_q]
    for k, q in enumerate(alpha_q):
        u = numerics.expm_hermitian(b, t * 2**k)
        ops.append(qsim.unitary(beta_q, u, controls=(q,), power=k, label="exp(iBt)"))
    ops.append(qsim.qft(alpha_q, inverse=True))
    return ops


def _rotation_ops(t, c, alpha_q, anc) -> list[qsim.GateOp]:
    alpha = len(alpha_q)
    ops = []
    for v in range(1, 2**alpha):
        flips = [qsim.x(q) for i, q in enumerate(alpha_q) if not (v >> i) & 1]
        ops += flips
        ops.append(qsim.ry(anc, rotation_angle(v, t, c, alpha), controls=alpha_q))
        ops += flips
    return ops


def build_circuit(sys: grid.DcSystem, params: HhlParams) -> qsim.Circuit:
    s = _setup(sys, params)
    circ = qsim.Circuit(s.n_beta + s.alpha + 1, _registers(s.n_beta, s.alpha))
    beta_q, alpha_q = circ.qubits("beta"), circ.qubits("alpha")
    anc = circ.qubits("ancilla")[0]
    qpe = _qpe_ops(s.b, s.t, alpha_q, beta_q)
    circ.add(qsim.prep(beta_q, s.p / np.linalg.norm(s.p)))
    circ.extend(qpe)
    circ.extend(_rotation_ops(s.t, s.c, alpha_q, anc))
    circ.extend(op.inverse() for op in reversed(qpe))
    return circ


def _eigenphase_hist(state: qsim.StateVector, alpha_q) -> dict[str, float]:
    probs = qsim.marginal(state, alpha_q)
    width = len(alpha_q)
    return {qsim.bitstring(v, width): float(pv) for v, pv in enumerate(probs) if pv > 1e-15}


def eigenphase_histogram(sys: grid.DcSystem, params: HhlParams) -> dict[str, float]:
    """Distribution of the alpha register right after phase estimation."""
    s = _setup(sys, params)
    circ = qsim.Circuit(s.n_beta + s.alpha + 1, _registers(s.n_beta, s.alpha))
    beta_q, alpha_q = circ.qubits("beta"), circ.qubits("alpha")
    circ.add(qsim.prep(beta_q, s.p / np.linalg.norm(s.p)))
    circ.extend(_qpe_ops(s.b, s.t, alpha_q, beta_q))
    return _eigenphase_hist(circ.run(), alpha_q)


def _beta_branch(state: qsim.StateVector, circ: qsim.Circuit, alpha_value: int = 0) -> np.ndarray:
    nb = circ.registers["beta"][1]
    anc = circ.qubits("ancilla")[0]
    base = (alpha_value << nb) | (1 << anc)
    return state.amplitudes[base + np.arange(2**nb)]


def _fidelity(target: np.ndarray, rho_or_vec: np.ndarray) -> float:
    tn = target / np.linalg.norm(target)
    if rho_or_vec.ndim == 2:
        f = float(np.real(tn.conj() @ rho_or_vec @ tn))
    else:
        v = rho_or_vec / np.linalg.norm(rho_or_vec)
        f = float(abs(np.vdot(tn, v)) ** 2)
    return min(1.0, max(0.0, f))


def _beta_density(state: qsim.StateVector, circ: qsim.Circuit) -> np.ndarray:
    nb = circ.registers["beta"][1]
    rest = state.n_qubits - nb
    psi = state.amplitudes.reshape(2**rest, 2**nb)
    return psi.T @ psi.conj()


def run(sys: grid.DcSystem, params: HhlParams | None = None) -> HhlOutcome:
    """Execute the HHL circuit and post-select the ancilla on 1.

    In exact mode the signed solution is read from the statevector. In sampled
    mode magnitudes come from ``params.shots`` measurements and signs are
    borrowed from the exact statevector (``oracle_assisted_signs``).
    """
    params = params or HhlParams()
    s = _setup(sys, params)
    circ = build_circuit(sys, params)
    alpha_q = circ.qubits("alpha")
    anc = circ.qubits("ancilla")[0]
    dim = sys.dim

    # phase-estimation snapshot: the prefix of the circuit up to the inverse QFT
    n_prefix = 1 + len(_qpe_ops(s.b, s.t, alpha_q, circ.qubits("beta")))
    after_qpe = qsim.run_ops(circ.ops[:n_prefix], qsim.StateVector.zero(circ.n_qubits))
    hist = _eigenphase_hist(after_qpe, alpha_q)
    final = qsim.run_ops(circ.ops[n_prefix:], after_qpe)

    p_exact = qsim.probability_of(final, anc, 1)
    post, _ = qsim.postselect(final, anc, 1)
    alpha_residual = 1.0 - float(qsim.marginal(post, alpha_q)[0])
    branch = _beta_branch(post, circ)
    if np.linalg.norm(branch) < 1e-9:
        # no weight left on alpha = 0: use the heaviest alpha branch
        weights = qsim.marginal(post, alpha_q)
        branch = _beta_branch(post, circ, int(np.argmax(weights)))
    leak = float(np.linalg.norm(branch[dim:]) / np.linalg.norm(branch))
    if leak > 1e-9 and s.eigs.size > dim:
        raise RuntimeError(f"padded amplitudes leaked into the solution ({leak:.2e})")
    psi = np.real(branch) / np.linalg.norm(branch)
    renorm = float(np.linalg.norm(s.p))
    classical = grid.solve_classical(sys)
    rho = _beta_density(post, circ)[:dim, :dim]

    if params.shots is None:
        prob = p_exact
        vec = psi[:dim]
        fidelity = _fidelity(classical, rho)
        counts = {}
        oracle_signs = False
    else:
        counts = qsim.sample(final, params.shots, params.seed)
        nb = circ.registers["beta"][1]
        hits = np.zeros(2**nb)
        n_success = 0
        for bits, cnt in counts.items():
            idx = int(bits, 2)
            if (idx >> anc) & 1:
                n_success += cnt
                if (idx >> nb) & (2 ** len(alpha_q) - 1) == 0:
                    hits[idx & (2**nb - 1)] += cnt
        if n_success == 0 or hits.sum() == 0:
            raise qsim.PostselectionError(
                f"post-selection impossible: no ancilla=1 shots in {params.shots}"
            )
        prob = n_success / params.shots
        mags = np.sqrt(hits / hits.sum())
        vec = (np.sign(psi) * mags)[:dim]
        fidelity = _fidelity(classical, vec)
        oracle_signs = True

    norm_theta = math.sqrt(prob) / s.c * renorm
    unit = vec / np.linalg.norm(vec)
    return HhlOutcome(
        solution=unit * norm_theta,
        norm_theta=norm_theta,
        success_probability=prob,
        fidelity=fidelity,
        resources=qsim.count_resources(circ),
        eigenphase_histogram=hist,
        t=s.t,
        c=s.c,
        alpha=s.alpha,
        eigenvalues=s.eigs,
        classical_solution=classical,
        normalized_solution=unit,
        alpha_residual=alpha_residual,
        renorm=renorm,
        mode=params.mode,
        shots=params.shots,
        seed=params.seed,
        oracle_assisted_signs=oracle_signs,
        counts=counts,
    )


def estimate_complexity(n: float, s: float, k: float, eps: float) -> ComplexityEstimate:
    """Asymptotic costs with unit constants; logarithms are base 2.

    classical (conjugate gradient): ``n * s * k * log(1/eps)``
    quantum (HHL): ``log(n) * s^2 * k^2 / eps``
    """
    for name, v in (("n", n), ("s", s), ("k", k), ("eps", eps)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    if k < 1:
        raise ValueError(f"condition number must be >= 1, got {k}")
    if eps >= 1:
        raise ValueError(f"eps must be < 1, got {eps}")
    classical = n * s * k * math.log2(1 / eps)
    quantum = math.log2(n) * s**2 * k**2 / eps
    return ComplexityEstimate(n, s, k, eps, classical, quantum)


def complexity_for(sys: grid.DcSystem, eps: float = 0.01) -> ComplexityEstimate:
    b = np.asarray(sys.reduced_b)
    eigs = numerics.eigh(b).eigenvalues
    s = int(np.max(np.count_nonzero(np.abs(b) > 1e-15, axis=1)))
    return estimate_complexity(sys.dim, s, float(eigs.max() / eigs.min()), eps)
