import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from hhlflow import numerics


def random_symmetric(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    return a + a.T


def test_eigh_three_bus_matrix():
    d = numerics.eigh([[1, -0.2], [-0.2, 1]])
    np.testing.assert_allclose(d.eigenvalues, [0.8, 1.2], atol=1e-12)
    s = 1 / np.sqrt(2)
    np.testing.assert_allclose(d.eigenvectors, [[s, s], [s, -s]], atol=1e-12)


def test_eigh_identity():
    w, u = numerics.eigh(np.eye(2))
    np.testing.assert_allclose(w, [1, 1])
    np.testing.assert_allclose(u.T @ u, np.eye(2), atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_eigh_random_4x4_reconstructs(seed):
    a = random_symmetric(seed, 4)
    d = numerics.eigh(a)
    assert np.linalg.norm(d.reconstruct() - a) < 1e-10
    # independent oracle: LAPACK
    np.testing.assert_allclose(d.eigenvalues, np.linalg.eigvalsh(a), atol=1e-10)


def test_eigh_ascending_and_sign_convention():
    d = numerics.eigh(random_symmetric(11, 6))
    assert np.all(np.diff(d.eigenvalues) >= 0)
    for col in d.eigenvectors.T:
        first = col[np.flatnonzero(np.abs(col) > 1e-12)[0]]
        assert first > 0


def test_eigh_rejects_non_hermitian_naming_pair():
    m = np.eye(3)
    m[0, 2] = 0.5
    with pytest.raises(numerics.NotHermitianError) as exc:
        numerics.eigh(m)
    assert set(exc.value.pair) == {0, 2}
    assert "(0,2)" in str(exc.value) or "(2,0)" in str(exc.value)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 16))
def test_eigh_reconstruction_property(seed, n):
    a = random_symmetric(seed, n)
    d = numerics.eigh(a)
    assert np.linalg.norm(d.reconstruct() - a) < 1e-10 * max(1.0, np.linalg.norm(a))
    assert np.linalg.norm(d.eigenvectors.T @ d.eigenvectors - np.eye(n)) < 1e-10


def test_expm_zero_is_identity():
    np.testing.assert_allclose(numerics.expm_hermitian(np.zeros((2, 2)), 3.7), np.eye(2), atol=1e-15)


def test_expm_identity_pi_is_minus_identity():
    np.testing.assert_allclose(numerics.expm_hermitian(np.eye(2), np.pi), -np.eye(2), atol=1e-15)


def test_expm_fixture_eigenphases():
    b = np.array([[1, -0.2], [-0.2, 1]])
    u = numerics.expm_hermitian(b, 2 * np.pi * 5 / 8)
    u1 = np.array([1, 1]) / np.sqrt(2)
    u2 = np.array([1, -1]) / np.sqrt(2)
    np.testing.assert_allclose(u @ u1, np.exp(1j * np.pi) * u1, atol=1e-12)
    np.testing.assert_allclose(u @ u2, np.exp(1.5j * np.pi) * u2, atol=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_expm_matches_pade(seed):
    a = random_symmetric(seed, 5)
    np.testing.assert_allclose(numerics.expm_hermitian(a, 0.3), scipy.linalg.expm(1j * 0.3 * a), atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(1, 6),
    t1=st.floats(-5, 5),
    t2=st.floats(-5, 5),
)
def test_expm_group_laws(seed, n, t1, t2):
    a = random_symmetric(seed, n)
    e1 = numerics.expm_hermitian(a, t1)
    assert numerics.is_unitary(e1)
    np.testing.assert_allclose(e1 @ numerics.expm_hermitian(a, t2), numerics.expm_hermitian(a, t1 + t2), atol=1e-9)
    np.testing.assert_allclose(e1 @ numerics.expm_hermitian(a, -t1), np.eye(n), atol=1e-9)


def test_solve_direct_three_bus_system():
    x = numerics.solve_direct([[1, -0.2], [-0.2, 1]], [0.6, -0.8])
    np.testing.assert_allclose(x, [0.4583, -0.7083], atol=5e-5)


def test_solve_direct_identity():
    b = np.array([1.5, -2.0, 0.25])
    np.testing.assert_array_equal(numerics.solve_direct(np.eye(3), b), b)


@pytest.mark.parametrize("seed", range(5))
def test_solve_direct_random_residual(seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(8, 8)) + 8 * np.eye(8)
    rhs = rng.normal(size=8)
    x = numerics.solve_direct(m, rhs)
    assert np.max(np.abs(m @ x - rhs)) < 1e-9 * (1 + np.linalg.norm(rhs))


def test_solve_direct_singular_reports_pivot():
    with pytest.raises(numerics.SingularMatrixError) as exc:
        numerics.solve_direct([[1, 2, 3], [2, 4, 6], [0, 0, 1]], [1, 2, 3])
    assert exc.value.pivot_index == 1
