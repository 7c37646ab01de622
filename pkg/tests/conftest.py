import time

import numpy as np
import pytest

from hhlflow import grid

_ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(criterion: str, ok: bool, detail: str = "") -> None:
    _ACCEPTANCE.append((criterion, bool(ok), detail))


_START = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    elapsed = time.perf_counter() - _START
    record("C7 total suite runtime", elapsed < 60.0, f"{elapsed:.1f} s")
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


def make_system(b, p) -> grid.DcSystem:
    """Wrap a bare (B, p) pair as a DcSystem with unit scale."""
    p = np.asarray(p, dtype=float)
    return grid.DcSystem(
        reduced_b=np.asarray(b, dtype=float),
        rhs_p=p,
        slack_bus=0,
        matrix_scale=1.0,
        bus_order=tuple(range(1, len(p) + 1)),
    )


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def dyadic_spd(rng, dim, alpha, scale=None):
    """SPD matrix whose eigenphases under the default evolution time fit in ``alpha`` bits.

    Eigenvalues are ``v * scale`` with integer ``v`` in [1, 2^alpha - 1] and
    the largest forced to ``2^alpha - 1``.
    """
    top = 2**alpha - 1
    v = rng.integers(1, top + 1, size=dim).astype(float)
    v[int(rng.integers(dim))] = top
    scale = scale if scale is not None else rng.uniform(0.5, 2.0) / top
    u = random_orthogonal(rng, dim)
    return (u * (v * scale)) @ u.T


@pytest.fixture
def three_bus():
    return grid.load_network("three_bus")


@pytest.fixture
def three_bus_system(three_bus):
    return grid.dc_system(three_bus)
