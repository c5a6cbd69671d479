"""Dense reference solvers.

Everything here is brute force on purpose: the routines exist to check the
iterative solvers, and to solve the tiny projected problems inside them.
Each result is residual-checked before it is handed out.
"""
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as la
from scipy import optimize

from ._linalg import as_matrix, is_positive_definite, make_rng, random_unit
from .errors import DimensionError, PreconditionError, SingularPencilError

DENSE_LIMIT_ENV = "QUOTIENTS_DENSE_LIMIT"


def dense_limit():
    return int(os.environ.get(DENSE_LIMIT_ENV, "512"))


def _check_size(n):
    if n > dense_limit():
        raise PreconditionError(
            f"dimension {n} exceeds the dense limit {dense_limit()} "
            f"(override with {DENSE_LIMIT_ENV})")


@dataclass
class EigenpairSet:
    """Eigenvalues with unit eigenvector columns.

    ``condition_flags[i]`` is ``"ok"``, ``"infinite"`` (beta = 0) or
    ``"unreliable"`` (residual check failed).
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    condition_flags: list

    def __len__(self):
        return len(self.eigenvalues)

    def finite(self):
        keep = [i for i, f in enumerate(self.condition_flags) if f != "infinite"]
        return EigenpairSet(self.eigenvalues[keep], self.eigenvectors[:, keep],
                            [self.condition_flags[i] for i in keep])

    def sorted(self, key=None):
        key = key or (lambda lam: (lam.real, lam.imag))
        order = sorted(range(len(self)), key=lambda i: key(self.eigenvalues[i]))
        return EigenpairSet(self.eigenvalues[order], self.eigenvectors[:, order],
                            [self.condition_flags[i] for i in order])


def _pair_residual(A, B, lam, v):
    return np.linalg.norm(A @ v - lam * (B @ v))


def dense_generalized_eig(A, B=None, hermitian=None, rtol=1e-8):
    """All eigenpairs of ``A v = lam B v``.

    Hermitian definite pairs go through the Cholesky reduction
    (``scipy.linalg.eigh``), everything else through the QZ algorithm.
    Infinite eigenvalues are reported with value ``inf`` and the
    ``"infinite"`` flag.
    """
    A = as_matrix(A, "A")
    n = A.shape[0]
    B = np.eye(n, dtype=complex) if B is None else as_matrix(B, "B")
    if B.shape != A.shape:
        raise DimensionError(f"A is {A.shape} but B is {B.shape}")
    _check_size(n)

    if hermitian is None:
        hermitian = (np.allclose(A, A.conj().T, rtol=0, atol=1e-13 * max(1, np.linalg.norm(A)))
                     and is_positive_definite(B))
    if hermitian:
        Ah = 0.5 * (A + A.conj().T)
        Bh = 0.5 * (B + B.conj().T)
        w, V = la.eigh(Ah, Bh)
        V = V / np.linalg.norm(V, axis=0)
        lam = w.astype(complex)
        beta = np.ones(n)
    else:
        (alpha, beta), V = la.eig(A, B, homogeneous_eigvals=True)
        V = V / np.linalg.norm(V, axis=0)
        scale = max(np.linalg.norm(A), np.linalg.norm(B))
        tiny = n * np.finfo(float).eps * scale
        if np.any((np.abs(alpha) <= tiny) & (np.abs(beta) <= tiny)):
            raise SingularPencilError("pencil is singular: det(A - lam B) vanishes identically")
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = np.where(np.abs(beta) > tiny, alpha / np.where(beta == 0, 1, beta), np.inf)

    normA, normB = np.linalg.norm(A), np.linalg.norm(B)
    flags = []
    for i in range(n):
        if not np.isfinite(lam[i]):
            flags.append("infinite")
            continue
        r = _pair_residual(A, B, lam[i], V[:, i])
        flags.append("ok" if r <= rtol * (normA + abs(lam[i]) * normB) else "unreliable")
    return EigenpairSet(np.asarray(lam, dtype=complex), V, flags)


class SVDResult(NamedTuple):
    U: np.ndarray
    s: np.ndarray
    Vh: np.ndarray


def svd_oracle(M, rtol=1e-10):
    """Full SVD with the residual check ``||M v - s u|| <= rtol ||M||_F``."""
    M = np.asarray(M, dtype=complex)
    _check_size(max(M.shape))
    U, s, Vh = la.svd(M)
    scale = np.linalg.norm(M)
    for i, sigma in enumerate(s):
        r = np.linalg.norm(M @ Vh[i].conj() - sigma * U[:, i])
        if r > rtol * max(scale, 1.0):
            raise ArithmeticError(f"SVD residual {r:.3e} exceeds tolerance for pair {i}")
    return SVDResult(U, s, Vh)


# ---------------------------------------------------------------------------
# two-by-two nonlinear problems

def _plap_sides(M, M2, p, z):
    u = M2 @ z
    mag = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = M.conj().T @ (np.abs(u) ** (p - 2) * (M @ z))
        rhs = np.where(mag > 0, mag ** (p - 2) * z, 0)
    return lhs, rhs


def _plap_residual(M, M2, p, z, lam):
    lhs, rhs = _plap_sides(M, M2, p, z)
    scale = max(np.linalg.norm(lhs), abs(lam) * np.linalg.norm(rhs), 1e-300)
    return np.linalg.norm(lhs - lam * rhs) / scale


def _scalar_equation(M, M2, p, w):
    """Residual of the eliminated scalar equation at z = (1, w); vectorized in w."""
    w = np.asarray(w, dtype=complex)
    u1 = M2[0, 0] + M2[0, 1] * w
    u2 = M2[1, 0] + M2[1, 1] * w
    d1 = np.abs(u1) ** (p - 2)
    d2 = np.abs(u2) ** (p - 2)
    v1 = M[0, 0] + M[0, 1] * w
    v2 = M[1, 0] + M[1, 1] * w
    Mh = M.conj().T
    a1 = Mh[0, 0] * d1 * v1 + Mh[0, 1] * d2 * v2
    a2 = Mh[1, 0] * d1 * v1 + Mh[1, 1] * d2 * v2
    # a1 = lam, a2 = lam |w|^{p-2} w
    return a1 * np.abs(w) ** (p - 2) * w - a2, a1


def plap_2x2_solve(M, M2, p, grid=200, refine_iters=50, newton_tol=1e-12,
                   residual_tol=1e-8):
    """Eigenpairs of ``M^*(|M2 z|^{p-2} o M z) = lam |z|^{p-2} o z`` for n = 2.

    Roots ``w`` of the scalar equation obtained at ``z = (1, w)`` are
    bracketed on a polar-free square grid covering the disk
    ``|w| <= 4 (||M||_F + ||M2||_F + 1)``, then polished by damped Newton on
    the real 2x2 system. Direction ``(0, 1)`` and kernel vectors (eigenvalue
    zero) are checked separately. Returns an :class:`EigenpairSet` that may
    be empty; ``coverage`` on the result records the grid radius.
    """
    M = as_matrix(M, "M")
    M2 = as_matrix(M2, "M2")
    if M.shape != (2, 2) or M2.shape != (2, 2):
        raise DimensionError("plap_2x2_solve needs 2x2 matrices")
    if p <= 1:
        raise PreconditionError("p must exceed 1")

    found = []

    def accept(z, lam):
        z = z / np.linalg.norm(z)
        # a NaN residual (zero entries with p < 2) must also be rejected
        if not _plap_residual(M, M2, p, z, lam) <= residual_tol:
            return
        for zz, ll in found:
            if abs(abs(np.vdot(zz, z)) - 1) < 1e-7 and abs(ll - lam) <= 1e-7 * max(1, abs(lam)):
                return
        found.append((z, lam))

    # kernel directions give lam = 0
    for mat in (M, M2):
        s = la.svdvals(mat)
        if s[-1] <= 1e-14 * max(s[0], 1e-300):
            z = la.null_space(mat, rcond=1e-12)[:, 0]
            if mat is M or p > 2:
                accept(z, 0.0)

    e2 = np.array([0, 1], dtype=complex)
    lhs, rhs = _plap_sides(M, M2, p, e2)
    if abs(lhs[0]) <= 1e-13 * max(np.linalg.norm(lhs), 1e-300):
        accept(e2, lhs[1] / rhs[1])

    radius = 4 * (np.linalg.norm(M) + np.linalg.norm(M2) + 1)
    xs = np.linspace(-radius, radius, grid)
    W = xs[None, :] + 1j * xs[:, None]
    F, _ = _scalar_equation(M, M2, p, W)
    mag = np.abs(F)
    mag[np.abs(W) > radius] = np.inf
    # local minima of |F| against the 8 neighbours
    inner_mag = mag[1:-1, 1:-1]
    is_min = np.ones_like(inner_mag, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            is_min &= inner_mag <= mag[1 + di:grid - 1 + di, 1 + dj:grid - 1 + dj]
    idx = np.argwhere(is_min & np.isfinite(inner_mag))
    cand = sorted(((inner_mag[i, j], W[i + 1, j + 1]) for i, j in idx), key=lambda t: t[0])
    h = xs[1] - xs[0]
    for _, w0 in cand[:40]:
        w = _newton_scalar(M, M2, p, w0, refine_iters, newton_tol, h)
        if w is None:
            continue
        _, lam = _scalar_equation(M, M2, p, w)
        accept(np.array([1.0, w], dtype=complex), complex(lam))

    if found:
        vals = np.array([lam for _, lam in found], dtype=complex)
        vecs = np.column_stack([z for z, _ in found])
    else:
        vals = np.zeros(0, dtype=complex)
        vecs = np.zeros((2, 0), dtype=complex)
    out = EigenpairSet(vals, vecs, ["ok"] * len(found))
    out.coverage = {"radius": float(radius), "grid": grid, "candidates": len(cand)}
    return out


def _newton_scalar(M, M2, p, w0, max_iter, tol, h0):
    """Damped Newton on (Re F, Im F) in (Re w, Im w) with a central-difference Jacobian."""
    w = complex(w0)

    def F(w):
        return _scalar_equation(M, M2, p, w)[0]

    f = F(w)
    for _ in range(max_iter):
        if abs(f) <= tol * max(1.0, abs(w)) ** max(p, 2):
            return w
        eps = 1e-7 * max(1.0, abs(w))
        dfx = (F(w + eps) - F(w - eps)) / (2 * eps)
        dfy = (F(w + 1j * eps) - F(w - 1j * eps)) / (2 * eps)
        J = np.array([[dfx.real, dfy.real], [dfx.imag, dfy.imag]])
        try:
            step = np.linalg.solve(J, -np.array([f.real, f.imag]))
        except np.linalg.LinAlgError:
            return None
        dw = step[0] + 1j * step[1]
        t = 1.0
        while t > 1e-6:
            fn = F(w + t * dw)
            if abs(fn) < abs(f):
                break
            t *= 0.5
        else:
            return w if abs(f) <= 1e-9 * max(1.0, abs(w)) ** max(p, 2) else None
        w, f = w + t * dw, fn
    return w


# ---------------------------------------------------------------------------

def grid_extremum(problem, num_starts=32, seed=0, direction="max"):
    """Best trial quotient found by multi-start BFGS over R^{2n}.

    ``problem`` needs callables ``A`` and ``B`` and a dimension ``n``; the
    quotient ``Re(A(z), z) / Re(B(z), z)`` is scale invariant when the
    degrees agree, so the search runs unconstrained on the normalized vector.
    """
    rng = make_rng(seed)
    n = problem.n
    sign = -1.0 if direction == "max" else 1.0

    def q(x):
        z = x[:n] + 1j * x[n:]
        z = z / np.linalg.norm(z)
        num = np.vdot(z, problem.A(z)).real
        den = np.vdot(z, problem.B(z)).real
        return sign * num / den

    best = None
    for _ in range(num_starts):
        z0 = random_unit(n, rng)
        x0 = np.concatenate([z0.real, z0.imag])
        res = optimize.minimize(q, x0, method="BFGS", options={"gtol": 1e-10})
        val = sign * res.fun
        if np.isfinite(val) and (best is None or (val > best if direction == "max" else val < best)):
            best = val
    return float(best)


def rlinear_real_eigenpairs(M, T, rtol=1e-10):
    """Real eigenvalues of ``M z + T conj(z) = lam z`` via its real 2n x 2n form.

    Only eigenpairs with real ``lam`` are visible to this oracle; the
    returned vectors are complex n-vectors.
    """
    M = as_matrix(M, "M")
    T = as_matrix(T, "T")
    n = M.shape[0]
    R = np.block([[M.real + T.real, -M.imag + T.imag],
                  [M.imag + T.imag, M.real - T.real]])
    w, V = la.eig(R)
    vals, vecs = [], []
    for i in range(2 * n):
        if abs(w[i].imag) > 1e-10 * max(1.0, abs(w[i])):
            continue
        x = V[:, i]
        # real eigenvector: rotate away the arbitrary complex phase
        k = np.argmax(np.abs(x))
        x = (x * np.exp(-1j * np.angle(x[k]))).real
        z = x[:n] + 1j * x[n:]
        z = z / np.linalg.norm(z)
        lam = w[i].real
        if np.linalg.norm(M @ z + T @ z.conj() - lam * z) <= rtol * (np.linalg.norm(M) + np.linalg.norm(T) + abs(lam)):
            vals.append(lam)
            vecs.append(z)
    if vals:
        return EigenpairSet(np.array(vals, dtype=complex), np.column_stack(vecs), ["ok"] * len(vals))
    return EigenpairSet(np.zeros(0, dtype=complex), np.zeros((n, 0), dtype=complex), [])
