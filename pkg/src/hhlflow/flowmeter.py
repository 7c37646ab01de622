"""Line-flow readout from the post-selected HHL solution register.

For a single-qubit readout ``psi = theta / |theta|``, a Hadamard before
measurement gives ``P(1) = (psi_0 - psi_1)^2 / 2``, hence
``(theta_m - theta_n)^2 = 2 |theta|^2 P(1)``. Lines touching the slack bus
use ``theta_slack = 0`` and measure the readout directly:
``theta_m^2 = |theta|^2 P(readout = index of m)``.

Only the square of the angle difference is observable. Flow signs are taken
from the classical solution and every estimate records that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import grid, hhl, qsim


class FlowmeterError(ValueError):
    pass


@dataclass(frozen=True)
class DeltaEstimate:
    delta_theta_sq: float
    p_one: float
    sigma: float  # binomial standard error of delta_theta_sq; 0 in exact mode
    shots: int | None


@dataclass(frozen=True)
class FlowEstimate:
    line: tuple[int, int]
    delta_theta_sq: float
    flow_pu: float
    flow_mw: float
    shots_used: int | None
    sigma_delta: float = 0.0
    oracle_assisted_sign: bool = True

    def to_dict(self) -> dict:
        return {
            "line": list(self.line),
            "delta_theta_sq": self.delta_theta_sq,
            "flow_pu": self.flow_pu,
            "flow_mw": self.flow_mw,
            "shots_used": "exact" if self.shots_used is None else self.shots_used,
            "sigma_delta": self.sigma_delta,
            "oracle_assisted_sign": self.oracle_assisted_sign,
        }


def _readout_state(readout) -> qsim.StateVector:
    if isinstance(readout, qsim.StateVector):
        return readout
    a = np.asarray(readout, dtype=complex).reshape(-1)
    return qsim.StateVector(max(1, (a.size - 1).bit_length()), a)


def _measure_one(state: qsim.StateVector, index: int, shots, seed) -> tuple[float, float]:
    probs = state.probabilities()
    p = float(probs[index])
    if shots is None:
        return p, 0.0
    counts = qsim.sample(state, shots, seed)
    hits = counts.get(qsim.bitstring(index, state.n_qubits), 0)
    p_hat = hits / shots
    return p_hat, math.sqrt(p * (1 - p) / shots)


def estimate_delta_sq(readout, norm_theta_sq: float, shots: int | None = None, seed=None) -> DeltaEstimate:
    """``(theta_0 - theta_1)^2`` of a two-component solution via the Hadamard trick."""
    state = _readout_state(readout)
    if state.n_qubits != 1:
        raise FlowmeterError(
            "pairwise-difference trick defined only for 2-dimensional solutions "
            f"(readout has {state.n_qubits} qubits)"
        )
    after_h = qsim.apply(state, qsim.h(0))
    p_one, sigma_p = _measure_one(after_h, 1, shots, seed)
    return DeltaEstimate(2 * norm_theta_sq * p_one, p_one, 2 * norm_theta_sq * sigma_p, shots)


def estimate_angle_sq(readout, index: int, norm_theta_sq: float, shots: int | None = None, seed=None) -> DeltaEstimate:
    """``theta_index^2``, i.e. the squared difference against the slack bus."""
    state = _readout_state(readout)
    p, sigma_p = _measure_one(state, index, shots, seed)
    return DeltaEstimate(norm_theta_sq * p, p, norm_theta_sq * sigma_p, shots)


def to_line_flow(est: DeltaEstimate, line: tuple[int, int], net: grid.Network, matrix_scale: float, sign: float = 1.0) -> FlowEstimate:
    m, n = line
    b = net.find_line(m, n).susceptance
    flow_pu = math.copysign(1.0, sign) * b * math.sqrt(max(est.delta_theta_sq, 0.0)) / matrix_scale
    return FlowEstimate(
        line=(m, n),
        delta_theta_sq=est.delta_theta_sq,
        flow_pu=flow_pu,
        flow_mw=flow_pu * net.base_mva,
        shots_used=est.shots,
        sigma_delta=est.sigma,
    )


def measure_line_flow(net: grid.Network, line: tuple[int, int], params: hhl.HhlParams | None = None) -> FlowEstimate:
    """Run HHL on ``net`` and read the flow on ``line`` (from ``line[0]`` to ``line[1]``).

    In sampled mode both ``|theta|^2`` (from the ancilla success rate) and the
    readout probability carry shot noise. Independent streams are derived
    from ``params.seed``.
    """
    params = params or hhl.HhlParams()
    m, n = line
    net.find_line(m, n)
    sys = grid.dc_system(net)
    exact = hhl.run(sys, replace(params, shots=None))
    readout = _readout_state(np.pad(exact.normalized_solution, (0, 2 ** max(1, (sys.dim - 1).bit_length()) - sys.dim)))
    if params.shots is None:
        norm_sq, seed_read = exact.norm_theta**2, None
    else:
        seed_run, seed_read = (
            int(child.generate_state(1)[0]) for child in np.random.SeedSequence(params.seed).spawn(2)
        )
        sampled = hhl.run(sys, replace(params, seed=seed_run))
        norm_sq = sampled.norm_theta**2
    angles = sys.expand_angles(exact.classical_solution)
    sign = 1.0 if angles[m] - angles[n] >= 0 else -1.0
    if sys.slack_bus in (m, n):
        other = n if m == sys.slack_bus else m
        est = estimate_angle_sq(readout, sys.bus_order.index(other), norm_sq, params.shots, seed_read)
    else:
        if readout.n_qubits != 1:
            raise FlowmeterError(
                "pairwise-difference trick defined only for 2-dimensional solutions"
            )
        est = estimate_delta_sq(readout, norm_sq, params.shots, seed_read)
    if params.shots is not None:
        # |theta|^2 was itself estimated from the ancilla success rate
        p_ok = exact.success_probability
        sigma_norm_sq = (exact.renorm / exact.c) ** 2 * math.sqrt(p_ok * (1 - p_ok) / params.shots)
        factor = est.delta_theta_sq / norm_sq if norm_sq > 0 else 0.0
        est = replace(est, sigma=math.hypot(est.sigma, factor * sigma_norm_sq))
    return to_line_flow(est, (m, n), net, sys.matrix_scale, sign)
