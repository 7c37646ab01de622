"""Acceptance criteria, one test per criterion, each printed as PASS/FAIL in the summary."""

import math
import time

import numpy as np

from hhlflow import cli, flowmeter, grid, hhl, numerics, qsim
from conftest import dyadic_spd, make_system, record

FIXTURE_T = 2 * math.pi * 5 / 8


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def test_c1_classical_fixture():
    def work():
        sys = grid.dc_system(grid.load_network("examples/three_bus"))
        return sys, grid.solve_classical(sys)

    (sys, theta), dt = _timed(work)
    b_err = float(np.max(np.abs(sys.reduced_b - np.array([[1, -0.2], [-0.2, 1]]))))
    p_err = float(np.max(np.abs(sys.rhs_p - np.array([0.6, -0.8]))))
    s_err = float(np.max(np.abs(theta - np.array([0.4583, -0.7083]))))
    ok = b_err <= 1e-12 and p_err <= 1e-12 and s_err <= 5e-4 and dt < 1.0
    record("C1 classical fixture", ok, f"B err {b_err:.1e}, p err {p_err:.1e}, theta err {s_err:.1e}, {dt*1e3:.1f} ms")
    assert ok


def test_c2_eigenstructure(three_bus_system):
    dec = numerics.eigh(three_bus_system.reduced_b)
    val_err = float(np.max(np.abs(dec.eigenvalues - [0.8, 1.2])))
    r = 1 / math.sqrt(2)
    vec_err = max(
        min(np.max(np.abs(dec.eigenvectors[:, j] - e)), np.max(np.abs(dec.eigenvectors[:, j] + e)))
        for j, e in enumerate([np.array([r, r]), np.array([r, -r])])
    )
    ok = val_err <= 1e-10 and vec_err <= 1e-10
    record("C2 eigenstructure", ok, f"eigenvalue err {val_err:.1e}, eigenvector err {vec_err:.1e}")
    assert ok


def test_c3_qpe_histogram(three_bus_system):
    hist = hhl.eigenphase_histogram(three_bus_system, hhl.HhlParams(alpha=2, t=FIXTURE_T))
    target = {"01": 0.02, "10": 0.98}
    keys = set(hist) | set(target)
    err = max(abs(hist.get(k, 0.0) - target.get(k, 0.0)) for k in keys)
    ok = err <= 1e-9
    shown = {k: round(v, 12) for k, v in sorted(hist.items())}
    record("C3 QPE histogram", ok, f"got {shown}, expected {target}")
    assert ok, f"histogram {shown} != {target}"


def test_c4_hhl_end_to_end(three_bus_system):
    out, dt = _timed(hhl.run, three_bus_system, hhl.HhlParams(alpha=2))
    classical = numerics.solve_direct(three_bus_system.reduced_b, three_bus_system.rhs_p)
    # independent oracle: C^2 sum_j |<u_j|p>|^2 / lambda_j^2 in the eigenbasis
    w, u = np.linalg.eigh(three_bus_system.reduced_b)
    p = three_bus_system.rhs_p / np.linalg.norm(three_bus_system.rhs_p)
    norm_sq_oracle = float(np.sum((u.T @ p) ** 2 / w**2)) * np.linalg.norm(three_bus_system.rhs_p) ** 2
    p_oracle = 0.625**2 * norm_sq_oracle / np.linalg.norm(three_bus_system.rhs_p) ** 2
    sol_err = float(np.max(np.abs(out.solution - classical)))
    checks = {
        "fidelity": out.fidelity >= 0.9999,
        "solution": sol_err <= 1e-6,
        "P": abs(out.success_probability - p_oracle) <= 1e-6 and round(p_oracle, 5) == 0.27805,
        "norm": abs(out.norm_theta**2 - norm_sq_oracle) <= 1e-6 and round(norm_sq_oracle, 5) == 0.71181,
        "runtime": dt < 1.0,
    }
    ok = all(checks.values())
    record(
        "C4 HHL end-to-end",
        ok,
        f"fidelity {out.fidelity:.9f}, sol err {sol_err:.1e}, P {out.success_probability:.7f}, "
        f"|theta|^2 {out.norm_theta**2:.7f}, {dt*1e3:.1f} ms",
    )
    assert ok, checks


def test_c5_width_and_stable_resources(three_bus_system):
    counts = [hhl.run(three_bus_system).resources for _ in range(3)]
    ok = counts[0].width == 4 and all(c == counts[0] for c in counts)
    r = counts[0]
    record("C5 circuit width", ok, f"width {r.width}, depth {r.depth}, two-qubit {r.two_qubit_gates}, one-qubit {r.one_qubit_gates}")
    assert ok


def test_c6_flowmeter(three_bus):
    exact = flowmeter.measure_line_flow(three_bus, (2, 3))
    shots = 10**5
    sampled = flowmeter.measure_line_flow(three_bus, (2, 3), hhl.HhlParams(shots=shots, seed=2024))
    again = flowmeter.measure_line_flow(three_bus, (2, 3), hhl.HhlParams(shots=shots, seed=2024))
    # 4 sigma binomial band on the readout probability, scaled to delta^2
    norm_sq = hhl.run(grid.dc_system(three_bus)).norm_theta ** 2
    p1 = exact.delta_theta_sq / (2 * norm_sq)
    binom = 2 * norm_sq * math.sqrt(p1 * (1 - p1) / shots)
    band = 4 * max(binom, sampled.sigma_delta)
    checks = {
        "delta": abs(exact.delta_theta_sq - 1.3609) <= 2e-3,
        "flow": abs(abs(exact.flow_mw) - 23.33) <= 0.05,
        "sampled": abs(sampled.delta_theta_sq - exact.delta_theta_sq) <= band,
        "seeded": sampled == again,
    }
    ok = all(checks.values())
    record(
        "C6 flowmeter",
        ok,
        f"delta^2 {exact.delta_theta_sq:.5f}, flow {exact.flow_mw:.3f} MW, "
        f"sampled {sampled.delta_theta_sq:.5f} (4 sigma {band:.4f})",
    )
    assert ok, checks


def test_c7a_b_c_oracle_equivalence():
    rng = np.random.default_rng(20240607)
    worst_fid, worst_norm, worst_resid, n = 1.0, 0.0, 0.0, 0
    for dim, count in ((2, 200), (4, 50)):
        for _ in range(count):
            alpha = int(rng.integers(2, 4))
            b = dyadic_spd(rng, dim, alpha)
            p = rng.normal(size=dim)
            out = hhl.run(make_system(b, p), hhl.HhlParams(alpha=alpha))
            theta = np.linalg.solve(b, p)
            worst_fid = min(worst_fid, out.fidelity)
            worst_norm = max(worst_norm, abs(out.success_probability - out.c**2 * theta @ theta / (p @ p)))
            worst_resid = max(worst_resid, out.alpha_residual)
            n += 1
    ok_a, ok_b, ok_c = worst_fid >= 1 - 1e-9, worst_norm <= 1e-9, worst_resid <= 1e-9
    record("C7a oracle equivalence", ok_a, f"{n} systems, min fidelity {worst_fid:.12f}")
    record("C7b norm identity", ok_b, f"max deviation {worst_norm:.1e}")
    record("C7c uncompute", ok_c, f"max alpha residual {worst_resid:.1e}")
    assert ok_a and ok_b and ok_c


def test_c7d_laplacian_invariants():
    rng = np.random.default_rng(7)
    worst_row, min_eig = 0.0, math.inf
    for _ in range(500):
        net = grid.random_network(rng, int(rng.integers(2, 9)))
        b = grid.build_b_matrix(net)
        worst_row = max(worst_row, float(np.max(np.abs(b.sum(axis=1)))) / float(np.max(np.diag(b))))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(grid.dc_system(net).reduced_b)[0]))
    ok = worst_row <= 1e-12 and min_eig > 0
    record("C7d Laplacian invariants", ok, f"500 networks, max rel row sum {worst_row:.1e}, min reduced eig {min_eig:.3e}")
    assert ok


def test_c7e_sampling_frequencies():
    rng = np.random.default_rng(99)
    shots, worst = 10**5, 0.0
    for _ in range(10):
        a = rng.normal(size=8) + 1j * rng.normal(size=8)
        s = qsim.StateVector(3, a / np.linalg.norm(a))
        counts = qsim.sample(s, shots, seed=int(rng.integers(2**31)))
        probs = s.probabilities()
        for idx, p in enumerate(probs):
            freq = counts.get(qsim.bitstring(idx, 3), 0) / shots
            worst = max(worst, abs(freq - p) / math.sqrt(p * (1 - p) / shots))
    ok = worst <= 4
    record("C7e sampling frequencies", ok, f"worst deviation {worst:.2f} sigma")
    assert ok


def test_c8_complexity_ratio():
    worst = 0.0
    for n, s, k, eps in [(2, 2, 1.5, 0.01), (100, 4, 10, 0.001), (10**4, 6, 50, 0.1)]:
        a = hhl.estimate_complexity(n, s, k, eps)
        b = hhl.estimate_complexity(10**4 * n, s, k, eps)
        worst = max(
            worst,
            abs(b.classical_cost / a.classical_cost - 10**4) / 10**4,
            abs(b.quantum_cost / a.quantum_cost - math.log(10**4 * n) / math.log(n)),
        )
    report = cli.execute(cli.parse_config(["complexity", "--n", "2", "--s", "2", "--k", "1.5", "--scale", "10000", "--format", "json"]))
    cli_ratio = report["scaled"]["quantum_ratio"]
    worst = max(worst, abs(cli_ratio - math.log(2 * 10**4) / math.log(2)))
    ok = worst <= 1e-12
    record("C8 complexity ratio", ok, f"max ratio error {worst:.1e}")
    assert ok
