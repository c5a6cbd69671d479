"""Matrix pencils M z = lam N z and their quotients.

Inner products are ``(x, y)_P = y^* P x`` for a Hermitian positive definite
weight ``P`` (identity when absent).
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg as la
from scipy import optimize

from ._linalg import as_matrix, as_vector, is_positive_definite
from .errors import (DegenerateError, DimensionError, IndefiniteError,
                     PreconditionError, SingularMatrixError, UndefinedPhaseError)

HERMITIAN_TOL = 1e-10
PHASE_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class HermitianPencil:
    """The pair (M, N) with an optional inner-product weight P.

    ``definite`` marks pencils built by :func:`fold`: both matrices are
    Hermitian and N is positive semidefinite, which is the classical
    Hermitian-definite structure even when ``N^* P M`` fails to be Hermitian.
    """
    M: np.ndarray
    N: np.ndarray
    P: Optional[np.ndarray] = None
    definite: bool = field(default=False)

    def __post_init__(self):
        M = as_matrix(self.M, "M")
        N = as_matrix(self.N, "N")
        if M.shape != N.shape:
            raise DimensionError(f"M is {M.shape} but N is {N.shape}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "N", N)
        if self.P is not None:
            P = as_matrix(self.P, "P")
            if P.shape != M.shape:
                raise DimensionError(f"P is {P.shape}, expected {M.shape}")
            if not is_positive_definite(P):
                raise IndefiniteError("inner-product weight P must be Hermitian positive definite")
            object.__setattr__(self, "P", P)
        for a in (self.M, self.N):
            a.setflags(write=False)

    @property
    def n(self):
        return self.M.shape[0]

    @cached_property
    def _chol(self):
        # upper factor R with P = R^* R, so ||x||_P = ||R x||
        if self.P is None:
            return None
        return la.cholesky(0.5 * (self.P + self.P.conj().T), lower=False)

    def weigh(self, x):
        """Apply P (identity when absent)."""
        return x if self.P is None else self.P @ x

    def ip(self, x, y):
        return np.vdot(y, self.weigh(x))

    def norm(self, x):
        if self.P is None:
            return np.linalg.norm(x)
        return np.linalg.norm(self._chol @ x)

    @cached_property
    def hermitian(self):
        return self.definite or is_hermitian_pencil(self)

    def with_weight(self, P):
        return HermitianPencil(self.M, self.N, P)


class QuotientKind(str, Enum):
    rayleigh = "rayleigh"
    optimal = "optimal"


class QuotientValue(NamedTuple):
    value: complex
    kind: QuotientKind
    at: np.ndarray


def _check(pencil):
    if not isinstance(pencil, HermitianPencil):
        raise TypeError("expected a HermitianPencil")


def is_hermitian_pencil(pencil, tol=HERMITIAN_TOL):
    """True iff ``N^* P M`` is Hermitian to relative Frobenius tolerance ``tol``."""
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    _check(pencil)
    C = pencil.N.conj().T @ pencil.weigh(pencil.M)
    return bool(np.linalg.norm(C - C.conj().T) <= tol * max(1.0, np.linalg.norm(C)))


def _unit_copy(z):
    return z / np.linalg.norm(z)


def _denominator_check(pencil, z, Nz):
    nz = pencil.norm(Nz)
    if nz <= np.sqrt(np.finfo(float).eps) * np.linalg.norm(pencil.N) * np.linalg.norm(z):
        raise DegenerateError("||N z|| vanishes: candidate eigenvalue at infinity", endpoint="inf")
    return nz


def rayleigh_quotient(pencil, z):
    """(M z, N z)_P / ||N z||_P^2."""
    _check(pencil)
    z = as_vector(z, pencil.n, "z")
    Mz, Nz = pencil.M @ z, pencil.N @ z
    nz = _denominator_check(pencil, z, Nz)
    return QuotientValue(complex(pencil.ip(Mz, Nz) / nz ** 2), QuotientKind.rayleigh, _unit_copy(z))


def optimal_quotient(pencil, z, phase_tol=PHASE_TOL):
    """Phase of (M z, N z)_P times ||M z||_P / ||N z||_P.

    Raises :class:`UndefinedPhaseError` (carrying the modulus) when
    ``|(M z, N z)_P| <= phase_tol ||M z||_P ||N z||_P``.
    """
    _check(pencil)
    z = as_vector(z, pencil.n, "z")
    Mz, Nz = pencil.M @ z, pencil.N @ z
    nz = _denominator_check(pencil, z, Nz)
    mz = pencil.norm(Mz)
    c = pencil.ip(Mz, Nz)
    if abs(c) <= phase_tol * mz * nz:
        raise UndefinedPhaseError("(Mz, Nz)_P vanishes; only the modulus is defined", mz / nz)
    return QuotientValue(complex(c / abs(c) * (mz / nz)), QuotientKind.optimal, _unit_copy(z))


def shifted(pencil, mu):
    """M - mu N."""
    return pencil.M - mu * pencil.N


def fold(pencil, mu):
    """The folded pencil ((M - mu N)^* P (M - mu N), N^* P N), identity weight."""
    _check(pencil)
    K = shifted(pencil, mu)
    A = K.conj().T @ pencil.weigh(K)
    B = pencil.N.conj().T @ pencil.weigh(pencil.N)
    A = 0.5 * (A + A.conj().T)
    B = 0.5 * (B + B.conj().T)
    return HermitianPencil(A, B, definite=True)


class PencilRoot(NamedTuple):
    M: np.ndarray
    N: np.ndarray
    X: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    A_used: np.ndarray
    B_used: np.ndarray


def _min_eig(C):
    return la.eigvalsh(0.5 * (C + C.conj().T))[0]


def definite_combination(A, B, num_angles=720):
    """Angle theta maximizing the smallest eigenvalue of cos(t) A + sin(t) B.

    Coarse scan on ``num_angles`` equispaced angles, then golden-section
    refinement on the bracketing cell. Returns ``(theta, min_eig)``.
    """
    thetas = np.linspace(0, 2 * np.pi, num_angles, endpoint=False)
    vals = np.array([_min_eig(np.cos(t) * A + np.sin(t) * B) for t in thetas])
    i = int(np.argmax(vals))
    h = thetas[1] - thetas[0]
    res = optimize.minimize_scalar(lambda t: -_min_eig(np.cos(t) * A + np.sin(t) * B),
                                   bracket=(thetas[i] - h, thetas[i], thetas[i] + h),
                                   method="golden", tol=1e-10)
    if -res.fun >= vals[i]:
        return float(res.x), float(-res.fun)
    return float(thetas[i]), float(vals[i])


def pencil_sqrt(A, B, U=None, num_angles=720):
    """A Hermitian pencil (M, N) whose folding spans the same real plane as {A, B}.

    If A and B are not both positive definite, a definite pair
    ``B' = C(theta*)``, ``A' = B' + t D(theta*)`` is formed from the best
    combination ``C(t) = cos(t) A + sin(t) B`` and its orthogonal direction
    ``D``. With ``B' = L L^*`` and ``L^{-1} A' L^{-*} = Q Lam Q^*`` the root
    is ``M = U Lam^{1/2} Q^* L^*`` and ``N = U Q^* L^*``, so that
    ``M^* M = A'`` and ``N^* N = B'``. ``X`` is returned with
    ``M = U Lam1 X^{-1}``, i.e. ``X = L^{-*} Q``.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"A is {A.shape} but B is {B.shape}")
    A = 0.5 * (A + A.conj().T)
    B = 0.5 * (B + B.conj().T)
    n = A.shape[0]

    if is_positive_definite(A) and is_positive_definite(B):
        A1, B1 = A, B
    else:
        theta, lo = definite_combination(A, B, num_angles)
        scale = max(np.linalg.norm(A, 2), np.linalg.norm(B, 2), 1e-300)
        if lo <= 1e-12 * scale:
            raise IndefiniteError("no positive definite element in span{A, B}", best_min_eig=lo)
        B1 = np.cos(theta) * A + np.sin(theta) * B
        D = -np.sin(theta) * A + np.cos(theta) * B
        nd = np.linalg.norm(D, 2)
        A1 = B1 + (0.5 * lo / nd) * D if nd > 0 else B1

    L = np.linalg.cholesky(B1)
    Linv = la.solve_triangular(L, np.eye(n), lower=True)
    S = Linv @ A1 @ Linv.conj().T
    lam, Q = la.eigh(0.5 * (S + S.conj().T))
    if lam[0] <= 0:
        raise IndefiniteError("reduced matrix is not positive definite", best_min_eig=float(lam[0]))
    U = np.eye(n) if U is None else as_matrix(U, "U")
    Xinv = Q.conj().T @ L.conj().T
    lambda1 = np.sqrt(lam)
    lambda2 = np.ones(n)
    M = U @ (lambda1[:, None] * Xinv)
    N = U @ Xinv
    X = Linv.conj().T @ Q
    return PencilRoot(M, N, X, lambda1, lambda2, A1, B1)


def _oq_rq(pencil, z):
    Mz, Nz = pencil.M @ z, pencil.N @ z
    nz = _denominator_check(pencil, z, Nz)
    rq = pencil.ip(Mz, Nz) / nz ** 2
    return Mz, Nz, nz, rq


def eigenvalue_distance_bound(pencil, z, mu):
    """|rq - mu|^2 + oq^2 - |rq|^2, an upper bound on dist(mu, spectrum)^2.

    Evaluated as ``|rq - mu|^2 + ||M z - rq N z||^2 / ||N z||^2``, which is the
    same number without the cancellation in ``oq^2 - rq^2``. Identity inner
    product only.
    """
    _check(pencil)
    if pencil.P is not None:
        raise PreconditionError("distance bound is only implemented for the identity inner product")
    if not is_hermitian_pencil(pencil):
        raise PreconditionError("distance bound requires a Hermitian pencil")
    try:
        np.linalg.cholesky(pencil.N.conj().T @ pencil.N)
    except np.linalg.LinAlgError:
        raise PreconditionError("N must be invertible") from None
    z = as_vector(z, pencil.n, "z")
    Mz, Nz, nz, rq = _oq_rq(pencil, z)
    return float(abs(rq - mu) ** 2 + np.linalg.norm(Mz - rq * Nz) ** 2 / nz ** 2)


def fem_saddle_inner_product(M11, M12, M22, N22):
    """Weight P = Z^* blockdiag(I, N22^{-1}) Z with Z = [[I, 0], [-M12^* M11^{-1}, I]].

    Makes the saddle-point pencil ([[M11, M12], [M12^*, M22]], blockdiag(0, N22))
    self-adjoint whenever M11 and M22 are Hermitian.
    """
    M11 = as_matrix(M11, "M11")
    N22 = as_matrix(N22, "N22")
    M22 = as_matrix(M22, "M22")
    M12 = np.asarray(M12, dtype=complex)
    n1, n2 = M11.shape[0], N22.shape[0]
    if M12.shape != (n1, n2) or M22.shape != (n2, n2):
        raise DimensionError("block shapes do not conform")
    if np.linalg.cond(M11) > 1 / np.finfo(float).eps:
        raise SingularMatrixError("M11 is singular")
    if not is_positive_definite(N22):
        raise IndefiniteError("N22 must be Hermitian positive definite")
    K = la.solve(M11.T, M12.conj()).T  # M12^* M11^{-1}
    Z = np.block([[np.eye(n1), np.zeros((n1, n2))], [-K, np.eye(n2)]])
    D = la.block_diag(np.eye(n1), la.inv(N22))
    P = Z.conj().T @ D @ Z
    return 0.5 * (P + P.conj().T)


def fem_saddle_pencil(M11, M12, M22, N22):
    """The saddle-point pencil with its self-adjoining weight attached."""
    M12 = np.asarray(M12, dtype=complex)
    M = np.block([[M11, M12], [M12.conj().T, M22]])
    n1, n2 = M12.shape
    N = la.block_diag(np.zeros((n1, n1)), N22)
    return HermitianPencil(M, N, fem_saddle_inner_product(M11, M12, M22, N22))


def linearize_quadratic(A0, A1, A2, tol=HERMITIAN_TOL):
    """Companion pencil of lam^2 A2 + lam A1 + A0.

    Returns ``(pencil, hermitian_flag)``; the weight
    ``blockdiag(I, -A0^* A2)`` is attached when that block is positive
    definite, and the flag additionally requires ``A2^* A1`` Hermitian.
    """
    A0, A1, A2 = (as_matrix(a, name) for a, name in ((A0, "A0"), (A1, "A1"), (A2, "A2")))
    n = A0.shape[0]
    if not (A0.shape == A1.shape == A2.shape):
        raise DimensionError("coefficients must share one square shape")
    I, O = np.eye(n), np.zeros((n, n))
    M = np.block([[A0, A1], [O, I]])
    N = np.block([[O, -A2], [I, O]])
    W = -A0.conj().T @ A2
    if is_positive_definite(W):
        pencil = HermitianPencil(M, N, la.block_diag(I, W))
        C = A2.conj().T @ A1
        flag = bool(np.linalg.norm(C - C.conj().T) <= tol * max(1.0, np.linalg.norm(C)))
        return pencil, flag
    return HermitianPencil(M, N), False
