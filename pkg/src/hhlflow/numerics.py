"""Small dense linear algebra used by the grid model and the HHL simulator.

Everything here targets matrices of dimension 16 or less. Eigenpairs come from
cyclic Jacobi rotations, matrix exponentials are built from those eigenpairs,
and the direct solver is plain Gaussian elimination with partial pivoting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
PIVOT_TOL = 1e-12
MAX_DIM = 16


class NotHermitianError(ValueError):
    """Raised when a matrix fails the conjugate-symmetry check."""

    def __init__(self, i: int, j: int, deviation: float):
        self.pair = (i, j)
        self.deviation = deviation
        super().__init__(
            f"matrix is not Hermitian: entries ({i},{j}) and ({j},{i}) "
            f"differ by {deviation:.3e}"
        )


class SingularMatrixError(ValueError):
    """Raised by :func:`solve_direct` when elimination meets a zero pivot."""

    def __init__(self, pivot_index: int, pivot: float):
        self.pivot_index = pivot_index
        self.pivot = pivot
        super().__init__(
            f"matrix is singular: pivot {pivot_index} has magnitude {pivot:.3e}"
        )


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvectors


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``m`` as an array, raising :class:`NotHermitianError` otherwise."""
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    dev = np.abs(a - a.conj().T)
    worst = np.unravel_index(int(np.argmax(dev)), dev.shape)
    if dev[worst] > tol:
        raise NotHermitianError(int(worst[0]), int(worst[1]), float(dev[worst]))
    return a


def _jacobi_sweeps(a: np.ndarray, max_sweeps: int = 64) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    scale = max(np.linalg.norm(a), 1.0)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # a <- J^T a J with J the (p, q) plane rotation
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.diag(a).copy(), v


def _canonical_signs(vectors: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        nz = np.flatnonzero(np.abs(col) > tol)
        if nz.size and col[nz[0]].real < 0:
            out[:, k] = -col
    return out


def eigh(m) -> EigenDecomposition:
    """Eigendecomposition of a real symmetric (Hermitian) matrix.

    Eigenvalues are returned ascending. Each eigenvector is oriented so that
    its first non-negligible component is positive.
    """
    a = check_hermitian(m)
    if np.iscomplexobj(a):
        if np.max(np.abs(a.imag)) > HERMITIAN_TOL:
            raise ValueError("complex Hermitian input is not supported; pass a real symmetric matrix")
        a = a.real
    a = np.asarray(a, dtype=float)
    if a.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {a.shape[0]} exceeds the supported maximum {MAX_DIM}")
    # symmetrize away sub-tolerance asymmetry so rotations stay exact
    a = 0.5 * (a + a.T)
    w, v = _jacobi_sweeps(a)
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], _canonical_signs(v[:, order]))


def expm_hermitian(m, t: float) -> np.ndarray:
    """Return exp(i m t) assembled from the eigenpairs of ``m``."""
    w, u = eigh(m)
    return (u * np.exp(1j * w * t)) @ u.conj().T


def solve_direct(m, rhs) -> np.ndarray:
    """Solve ``m x = rhs`` by Gaussian elimination with partial pivoting."""
    a = np.array(m, dtype=float)
    b = np.array(rhs, dtype=float).reshape(-1)
    n = a.shape[0]
    if a.shape != (n, n) or b.shape != (n,):
        raise ValueError(f"shape mismatch: matrix {a.shape}, rhs {b.shape}")
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= PIVOT_TOL:
            raise SingularMatrixError(k, float(abs(a[p, k])))
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        f = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k:] -= np.outer(f, a[k, k:])
        b[k + 1 :] -= f * b[k]
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1 :] @ x[k + 1 :]) / a[k, k]
    return x


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=tol, rtol=0))
