"""Small numerical helpers used across modules."""
import numpy as np

from .errors import DimensionError


def as_matrix(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a.astype(np.complex128, copy=False)


def as_vector(z, n=None, name="vector"):
    z = np.asarray(z, dtype=np.complex128)
    if z.ndim == 2 and 1 in z.shape:
        z = z.reshape(-1)
    if z.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {z.shape}")
    if n is not None and z.shape[0] != n:
        raise DimensionError(f"{name} has length {z.shape[0]}, expected {n}")
    return z


def inner(x, y):
    """(x, y) = y^* x."""
    return np.vdot(y, x)


def hermitian_part_defect(a):
    """Relative Frobenius distance of ``a`` from its conjugate transpose."""
    scale = max(1.0, np.linalg.norm(a))
    return np.linalg.norm(a - a.conj().T) / scale


def is_positive_definite(a):
    if hermitian_part_defect(a) > 1e-12:
        return False
    try:
        np.linalg.cholesky(0.5 * (a + a.conj().T))
    except np.linalg.LinAlgError:
        return False
    return True


def random_unit(n, rng):
    """Complex standard Gaussian vector normalized to unit 2-norm."""
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def pnorm_p(z, p):
    """Sum of |z_j|**p (the p-th power of the p-norm)."""
    return float(np.sum(np.abs(z) ** p))
