"""Inverse-free subspace iteration for the eigenvalue of a Hermitian pencil nearest a shift.

Each step takes the conjugate co-gradient of the folded objective
``||(M - mu N) z||^2 / ||N z||^2``, adds it to a growing orthonormal basis,
and minimizes the objective over that basis by a small dense solve.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as la

from ._linalg import as_vector, make_rng, random_unit
from .errors import DegenerateError, PreconditionError, RankDeficiencyError, UndefinedPhaseError
from .oracle import dense_generalized_eig
from .pencil import HermitianPencil, optimal_quotient, shifted
from .trace import ConvergenceTrace, TraceRecord

REORTH_DROP = 1e-12
KERNEL_TOL = 1e-12


@dataclass
class SubspaceState:
    Z: np.ndarray
    mu: float
    z: np.ndarray
    iteration: int = 0

    def orthogonality_defect(self):
        m = self.Z.shape[1]
        return np.linalg.norm(self.Z.conj().T @ self.Z - np.eye(m))


@dataclass
class FoldedResult:
    eigenvalue: complex
    z: np.ndarray
    trace: ConvergenceTrace
    converged: bool
    iterations: int
    folded_value: float
    phase_defined: bool = True
    state: Optional[SubspaceState] = field(default=None, repr=False)


def _folded_parts(pencil, mu, z):
    Kz = shifted(pencil, mu) @ z
    Nz = pencil.N @ z
    return Kz, Nz


def folded_objective(pencil, mu, z):
    """||(M - mu N) z||_P^2 / ||N z||_P^2."""
    Kz, Nz = _folded_parts(pencil, mu, z)
    return float(pencil.norm(Kz) ** 2 / pencil.norm(Nz) ** 2)


def cogradient_step(pencil, mu, z):
    """w = K^* P K z - (||K z||^2 / ||N z||^2) N^* P N z with K = M - mu N.

    This is ``||N z||^2`` times the conjugate co-gradient of the folded
    objective.
    """
    z = as_vector(z, pencil.n, "z")
    K = shifted(pencil, mu)
    Kz, Nz = K @ z, pencil.N @ z
    nz2 = pencil.norm(Nz) ** 2
    if nz2 <= np.finfo(float).eps * (np.linalg.norm(pencil.N) * np.linalg.norm(z)) ** 2:
        raise DegenerateError("||N z|| vanishes", endpoint="inf")
    ratio = pencil.norm(Kz) ** 2 / nz2
    return K.conj().T @ pencil.weigh(Kz) - ratio * (pencil.N.conj().T @ pencil.weigh(Nz))


def project_and_solve(pencil, mu, Z):
    """Smallest eigenpair of the folded problem restricted to range(Z).

    Returns ``(v, lam_min)`` with ``v`` of unit norm. Directions of range(Z)
    annihilated by ``N`` carry infinite objective and are eliminated.
    """
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim == 1:
        Z = Z[:, None]
    Mt, Nt = pencil.M @ Z, pencil.N @ Z
    Kt = Mt - mu * Nt
    A = Kt.conj().T @ pencil.weigh(Kt)
    B = Nt.conj().T @ pencil.weigh(Nt)
    A = 0.5 * (A + A.conj().T)
    B = 0.5 * (B + B.conj().T)
    w, V = np.linalg.eigh(B)
    keep = w > KERNEL_TOL * max(w[-1], 0.0)
    if not keep.any():
        raise RankDeficiencyError("projected N^* N vanishes")
    if keep.all():
        pairs = dense_generalized_eig(A, B, hermitian=True)
        i = int(np.argmin(pairs.eigenvalues.real))
        v = pairs.eigenvectors[:, i]
        return v / np.linalg.norm(v), max(float(pairs.eigenvalues[i].real), 0.0)
    # N Z has a kernel (singular N): minimize over it exactly via the Schur complement
    R, K = V[:, keep], V[:, ~keep]
    Arr = R.conj().T @ A @ R
    Ark = R.conj().T @ A @ K
    Akk = K.conj().T @ A @ K
    C = np.linalg.pinv(0.5 * (Akk + Akk.conj().T), hermitian=True) @ Ark.conj().T
    S = Arr - Ark @ C
    S = 0.5 * (S + S.conj().T)
    lam, a = la.eigh(S, np.diag(w[keep]))
    a0 = a[:, 0]
    v = R @ a0 - K @ (C @ a0)
    return v / np.linalg.norm(v), max(float(lam[0]), 0.0)


def _mgs_append(Z, w):
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Returns the new unit column, or None when ``w`` lies in range(Z).
    """
    w0 = np.linalg.norm(w)
    if w0 == 0:
        return None
    v = w.copy()
    for _ in range(2):
        for j in range(Z.shape[1]):
            v -= np.vdot(Z[:, j], v) * Z[:, j]
    nv = np.linalg.norm(v)
    if nv <= REORTH_DROP * w0:
        return None
    return v / nv


def _estimate(pencil, z):
    try:
        return optimal_quotient(pencil, z).value, True
    except UndefinedPhaseError as exc:
        return complex(exc.magnitude), False


def folded_iterate(pencil, mu, z0=None, max_iter=200, tol=1e-10, restart_every=None, seed=0):
    """Approximate the eigenvalue of a Hermitian pencil nearest the real shift ``mu``.

    Stops when the co-gradient norm drops below
    ``tol * (||M||_F + |mu| ||N||_F)`` per unit ``z``, or when a new
    direction adds nothing to the basis. With ``restart_every=r`` the basis
    collapses to the current Ritz vector every ``r`` iterations.
    """
    if not isinstance(pencil, HermitianPencil):
        raise TypeError("expected a HermitianPencil")
    if not pencil.hermitian:
        raise PreconditionError("folded iteration needs a Hermitian pencil")
    mu = float(np.real(mu))
    if z0 is None:
        z0 = random_unit(pencil.n, make_rng(seed))
    z = as_vector(z0, pencil.n, "z0")
    if np.linalg.norm(z) == 0:
        raise PreconditionError("starting vector must be nonzero")
    z = z / np.linalg.norm(z)

    scale = np.linalg.norm(pencil.M) + abs(mu) * np.linalg.norm(pencil.N)
    state = SubspaceState(Z=z[:, None].copy(), mu=mu, z=z)
    trace = ConvergenceTrace()

    def record(it, w=None):
        lam, _ = _estimate(pencil, state.z)
        Mz, Nz = pencil.M @ state.z, pencil.N @ state.z
        res = np.linalg.norm(Mz - lam * Nz)
        trace.append(TraceRecord(it, folded_objective(pencil, mu, state.z), lam, res,
                                 None if w is None else float(np.linalg.norm(w))))

    record(0)
    converged = False
    for it in range(1, max_iter + 1):
        w = cogradient_step(pencil, mu, state.z)
        trace.records[-1].grad_norm = float(np.linalg.norm(w))
        if np.linalg.norm(w) <= tol * scale:
            converged = True
            break
        if restart_every and (it - 1) % restart_every == 0 and it > 1:
            state.Z = state.z[:, None].copy()
        v = _mgs_append(state.Z, w)
        if v is None:
            converged = True
            break
        state.Z = np.column_stack([state.Z, v])
        y, _ = project_and_solve(pencil, mu, state.Z)
        z = state.Z @ y
        state.z = z / np.linalg.norm(z)
        state.iteration = it
        record(it)
    else:
        w = cogradient_step(pencil, mu, state.z)
        trace.records[-1].grad_norm = float(np.linalg.norm(w))
        converged = bool(np.linalg.norm(w) <= tol * scale)

    lam, phase_ok = _estimate(pencil, state.z)
    return FoldedResult(eigenvalue=lam, z=state.z, trace=trace, converged=converged,
                        iterations=state.iteration, folded_value=trace.records[-1].objective,
                        phase_defined=phase_ok, state=state)
