"""Seeded random instances for tests, benchmarks and scripts."""
import numpy as np
import scipy.linalg as la

from ._linalg import make_rng
from .pencil import HermitianPencil, fem_saddle_pencil, linearize_quadratic


def complex_gaussian(shape, rng):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(n, rng):
    q, r = np.linalg.qr(complex_gaussian((n, n), rng))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(n, rng, scale=1.0):
    a = complex_gaussian((n, n), rng)
    return scale * 0.5 * (a + a.conj().T)


def random_spd(n, rng, shift=1.0):
    a = complex_gaussian((n, n), rng)
    return a @ a.conj().T / n + shift * np.eye(n)


def random_skew_symmetric(n, rng):
    """Complex T with T^T = -T (invertible for generic draws when n is even)."""
    a = complex_gaussian((n, n), rng)
    return 0.5 * (a - a.T)


def random_hermitian_pencil(n, seed=None, eigenvalues=None, cond=10.0):
    """Pencil (U L1 X^{-1}, U L2 X^{-1}) with N^* M Hermitian by construction.

    Real diagonal cores; ``X`` has singular values spread over ``[1, cond]``.
    Returns ``(pencil, eigenvalues)``.
    """
    rng = make_rng(seed)
    if eigenvalues is None:
        eigenvalues = rng.uniform(-5, 5, n)
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    l2 = rng.uniform(0.5, 2.0, n) * rng.choice([-1.0, 1.0], n)
    l1 = eigenvalues * l2
    U = random_unitary(n, rng)
    svals = np.geomspace(1.0, cond, n)
    X = random_unitary(n, rng) @ np.diag(svals) @ random_unitary(n, rng)
    Xinv = np.linalg.inv(X)
    M = U @ (l1[:, None] * Xinv)
    N = U @ (l2[:, None] * Xinv)
    return HermitianPencil(M, N), np.sort(eigenvalues)


def random_fem_saddle(n1, n2, seed=None):
    """Saddle-point pencil with Hermitian blocks, invertible M11, SPD N22."""
    rng = make_rng(seed)
    M11 = random_spd(n1, rng) * rng.choice([-1.0, 1.0])
    M12 = complex_gaussian((n1, n2), rng) / np.sqrt(n1)
    M22 = random_hermitian(n2, rng)
    N22 = random_spd(n2, rng)
    return fem_saddle_pencil(M11, M12, M22, N22), (M11, M12, M22, N22)


def random_quadratic_linearized(n, seed=None):
    """Quadratic lam^2 A2 + lam A1 + A0 with -A0^* A2 positive definite and A2^* A1 Hermitian."""
    rng = make_rng(seed)
    # A0^* A2 Hermitian needs A0, A2 to commute: share eigenvectors
    Q = random_unitary(n, rng)
    A2 = -Q @ np.diag(rng.uniform(0.5, 2, n)) @ Q.conj().T
    A0 = Q @ np.diag(rng.uniform(0.5, 2, n)) @ Q.conj().T
    H = random_hermitian(n, rng)
    A1 = la.solve(A2.conj().T, H)  # A2^* A1 = H
    pencil, flag = linearize_quadratic(A0, A1, A2)
    return pencil, flag, (A0, A1, A2)
