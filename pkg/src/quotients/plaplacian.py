"""The matrix p-Laplacian eigenproblem.

Simple form:      M^*(|M z|^{p-2} o M z) = lam |z|^{p-2} o z
Three-matrix form: M1(|M2 z|^{p-2} o M3 z) = lam |z|^{p-2} o z

Absolute values and powers act entrywise. The simple form is the
stationarity condition of ``||M z||_p^p / ||z||_p^p``.
"""
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg as la

from ._ascent import sphere_ascent
from ._linalg import as_matrix, as_vector, make_rng, pnorm_p, random_unit
from .errors import (DegenerateError, DimensionError, InconsistencyError,
                     PreconditionError, UnsupportedExponentError)
from .homogeneous import HomogeneousProblem

CLAMP = 1e-12
RESIDUAL_TOL = 1e-8
ANGLE_TOL = 1e-4


def phi_p(w, p):
    """Entrywise |w|^{p-2} w, extended by 0 at w = 0."""
    w = np.asarray(w, dtype=complex)
    mag = np.abs(w)
    out = np.zeros_like(w)
    nz = mag > 0
    out[nz] = mag[nz] ** (p - 1) * (w[nz] / mag[nz])
    return out


def _weights(u, power):
    """|u|^power with tiny entries clamped when the power is negative."""
    mag = np.abs(u)
    if power < 0:
        floor = CLAMP * max(mag.max(initial=0.0), np.finfo(float).tiny)
        mag = np.maximum(mag, floor)
    return mag ** power


@dataclass(frozen=True, eq=False)
class PLaplacianProblem:
    M1: np.ndarray
    M2: np.ndarray
    M3: np.ndarray
    p: float

    def __post_init__(self):
        mats = [as_matrix(getattr(self, name), name) for name in ("M1", "M2", "M3")]
        if not (mats[0].shape == mats[1].shape == mats[2].shape):
            raise DimensionError("M1, M2, M3 must share one square shape")
        if not self.p > 1:
            raise UnsupportedExponentError("p must exceed 1")
        for name, m in zip(("M1", "M2", "M3"), mats):
            object.__setattr__(self, name, m)
        object.__setattr__(self, "p", float(self.p))

    @classmethod
    def simple(cls, M, p):
        M = as_matrix(M, "M")
        return cls(M.conj().T, M, M, p)

    @property
    def n(self):
        return self.M1.shape[0]

    @property
    def M(self):
        return self.M3

    @property
    def simple_flag(self):
        return bool(np.array_equal(self.M2, self.M3) and np.array_equal(self.M1, self.M3.conj().T))

    def as_homogeneous(self):
        return HomogeneousProblem(lambda z: apply(self, z)[0], lambda z: phi_p(z, self.p),
                                  self.p - 1, self.p - 1, self.n, name=f"plap(p={self.p:g})")


def apply(problem, z):
    """Both sides ``(M1(|M2 z|^{p-2} o M3 z), |z|^{p-2} o z)``."""
    z = as_vector(z, problem.n, "z")
    p = problem.p
    u = problem.M2 @ z
    v = problem.M3 @ z
    if problem.M2 is problem.M3 or np.array_equal(problem.M2, problem.M3):
        inner_vec = phi_p(v, p)
    else:
        inner_vec = _weights(u, p - 2) * v
    return problem.M1 @ inner_vec, phi_p(z, p)


def _require_simple(problem):
    if not problem.simple_flag:
        raise PreconditionError("operation needs the simple form M1 = M^*, M2 = M3 = M")


def p_quotient(problem, z):
    """||M z||_p^p / ||z||_p^p."""
    _require_simple(problem)
    z = as_vector(z, problem.n, "z")
    den = pnorm_p(z, problem.p)
    if den == 0:
        raise DegenerateError("z = 0", endpoint=None)
    return pnorm_p(problem.M @ z, problem.p) / den


def p_gradient(problem, z):
    """Conjugate co-gradient of :func:`p_quotient`.

    ``(p/2) (M^* phi_p(M z) - R(z) phi_p(z)) / ||z||_p^p``.
    """
    _require_simple(problem)
    z = as_vector(z, problem.n, "z")
    p = problem.p
    den = pnorm_p(z, p)
    if den == 0:
        raise DegenerateError("z = 0", endpoint=None)
    M = problem.M
    Mz = M @ z
    R = pnorm_p(Mz, p) / den
    return 0.5 * p * (M.conj().T @ phi_p(Mz, p) - R * phi_p(z, p)) / den


@dataclass
class ExtremeResult:
    eigenvalue: float
    z: np.ndarray
    trace: object
    converged: bool
    status: str
    iterations: int


def p_extreme(problem, direction="max", z0=None, max_iter=2000, tol=1e-10, seed=0,
              use_inverse=False):
    """Largest (``direction="max"``) or smallest eigenvalue by sphere ascent/descent.

    With ``use_inverse=True`` and ``direction="min"`` the minimum is taken as
    ``1 / max`` of the quotient for ``M^{-1}`` and the eigenvector mapped
    back through ``M^{-1}``.
    """
    _require_simple(problem)
    if direction not in ("max", "min"):
        raise ValueError("direction must be 'max' or 'min'")
    if z0 is None:
        z0 = random_unit(problem.n, make_rng(seed))
    z0 = as_vector(z0, problem.n, "z0")
    if np.linalg.norm(z0) == 0:
        raise PreconditionError("starting vector must be nonzero")

    if direction == "min" and use_inverse:
        Minv = la.inv(problem.M)
        inv = PLaplacianProblem.simple(Minv, problem.p)
        res = p_extreme(inv, "max", problem.M @ z0, max_iter, tol)
        z = Minv @ res.z
        z = z / np.linalg.norm(z)
        return ExtremeResult(p_quotient(problem, z), z, res.trace, res.converged, res.status,
                             res.iterations)

    def record(z, val, g):
        return {"eigenvalue": complex(val)}

    res = sphere_ascent(lambda z: p_quotient(problem, z), lambda z: p_gradient(problem, z), z0,
                        maximize=(direction == "max"), max_iter=max_iter, gtol=tol,
                        record=record)
    return ExtremeResult(res.value, res.z, res.trace, res.converged, res.status, res.iterations)


def p_extreme_multistart(problem, direction="max", starts=8, seed=0, **kwargs):
    """Best of ``starts`` seeded runs of :func:`p_extreme`."""
    rng = make_rng(seed)
    best = None
    for _ in range(starts):
        res = p_extreme(problem, direction, random_unit(problem.n, rng), **kwargs)
        better = best is None or (res.eigenvalue > best.eigenvalue if direction == "max"
                                  else res.eigenvalue < best.eigenvalue)
        if better:
            best = res
    return best


def dual_vector(u, p):
    """j(u) = ||u||_p^{1-p} |u|^{p-2} o u."""
    u = np.asarray(u, dtype=complex)
    nu = pnorm_p(u, p) ** (1.0 / p)
    if nu == 0:
        raise DegenerateError("dual vector of zero", endpoint=None)
    return nu ** (1 - p) * phi_p(u, p)


def deflation_basis(u, p):
    """Orthonormal basis of the kernel of ``z -> (z, j(u))``."""
    j = dual_vector(u, p)
    return la.null_space(j.conj()[None, :])


class DeflationResult(NamedTuple):
    eigenvalue: float
    w: np.ndarray
    classification: str
    z: np.ndarray
    residual: float
    angle: Optional[float]
    converged: bool


def _angle(x, y):
    c = abs(np.vdot(x, y)) / (np.linalg.norm(x) * np.linalg.norm(y))
    return float(np.arccos(min(1.0, c)))


def deflated_extremum(problem, W, direction="max", w0=None, max_iter=4000, tol=1e-12, seed=0,
                      u=None, residual_tol=RESIDUAL_TOL, angle_tol=ANGLE_TOL):
    """Optimize ``||M W w||_p^p / ||W w||_p^p`` and classify the optimum.

    At the optimum ``z = W w`` the unprojected residual
    ``r = M^*(phi_p(M z)) - lam phi_p(z)`` is either small (``"eigenpair"``)
    or, since ``W^* r = 0`` there, parallel to the dual vector that defined
    ``W`` (``"deflation_coupled"``). The dual direction is taken as the
    orthogonal complement of range(W) when ``u`` is not given.
    """
    _require_simple(problem)
    W = np.asarray(W, dtype=complex)
    n, m = W.shape
    if n != problem.n:
        raise DimensionError(f"W has {n} rows, expected {problem.n}")
    p = problem.p
    M = problem.M
    MW = M @ W
    if w0 is None:
        w0 = random_unit(m, make_rng(seed))

    def f(w):
        return pnorm_p(MW @ w, p) / pnorm_p(W @ w, p)

    def grad(w):
        z = W @ w
        den = pnorm_p(z, p)
        R = pnorm_p(MW @ w, p) / den
        return 0.5 * p * W.conj().T @ (M.conj().T @ phi_p(MW @ w, p) - R * phi_p(z, p)) / den

    res = sphere_ascent(f, grad, w0, maximize=(direction == "max"), max_iter=max_iter, gtol=tol,
                        record=lambda w, val, g: {"eigenvalue": complex(val)})
    w = res.z
    z = W @ w
    lam = res.value
    r = M.conj().T @ phi_p(M @ z, p) - lam * phi_p(z, p)
    scale = np.linalg.norm(M) ** (p - 1) * np.linalg.norm(z) ** (p - 1)
    rn = float(np.linalg.norm(r))
    if rn <= residual_tol * scale:
        return DeflationResult(lam, w, "eigenpair", z, rn / scale, None, res.converged)
    if u is not None:
        j = dual_vector(u, p)
    else:
        j = la.null_space(W.conj().T)[:, 0]
    ang = _angle(r, j)
    if ang <= angle_tol:
        return DeflationResult(lam, w, "deflation_coupled", z, rn / scale, ang, res.converged)
    raise InconsistencyError(
        f"residual {rn:.3e} is neither small nor parallel to the dual vector (angle {ang:.3e})")


def generalized_gradient_apply(M, M2, p, z):
    """((p-2)/2) M2^*(|M2 z|^{p-4} |M z|^2 o M2 z) + M^*(|M2 z|^{p-2} o M z).

    This is exactly the conjugate co-gradient of
    ``F(z) = (M z)^*(|M2 z|^{p-2} o M z)``.
    """
    if p <= 2:
        raise UnsupportedExponentError("generalized gradient needs p > 2")
    M = as_matrix(M, "M")
    M2 = as_matrix(M2, "M2")
    z = as_vector(z, M.shape[0], "z")
    u = M2 @ z
    v = M @ z
    first = 0.5 * (p - 2) * (M2.conj().T @ (_weights(u, p - 4) * np.abs(v) ** 2 * u))
    second = M.conj().T @ (_weights(u, p - 2) * v)
    return first + second


def generalized_potential(M, M2, p, z):
    """F(z) = (M z)^*(|M2 z|^{p-2} o M z), real and non-negative."""
    u = M2 @ z
    v = M @ z
    return float(np.sum(_weights(u, p - 2) * np.abs(v) ** 2))


def three_matrix_problem(M, M2, p):
    """M^*(|M2 z|^{p-2} o M z) = lam |z|^{p-2} o z as a :class:`PLaplacianProblem`."""
    M = as_matrix(M, "M")
    return PLaplacianProblem(M.conj().T, M2, M, p)
