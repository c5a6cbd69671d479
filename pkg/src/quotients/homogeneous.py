"""Homogeneous nonlinear eigenproblems A(z, z̄) = lam B(z, z̄).

A problem is a pair of black-box maps with declared degrees ``k`` and ``l``
under real scaling. The tools here test that declaration, build the Euler
trial quotient, decide numerically whether the problem is the co-gradient
of a real quotient, and fall back on the Cauchy-Schwarz quotient when it is
not.
"""
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy import optimize

from ._ascent import sphere_ascent
from ._linalg import as_matrix, as_vector, make_rng, random_unit
from .errors import (DegenerateError, DimensionError, EvaluationError, NonHomogeneousError,
                     PreconditionError, UndefinedPhaseError)

FD_STEP = 1e-5
GRADIENT_TOL = 1e-4
DEGREE_TOL = 1e-6
G_VANISH_TOL = 1e-8
DEGREE_RADII = (0.5, 0.75, 1.5, 2.0)


@dataclass(frozen=True)
class HomogeneousProblem:
    """Maps ``A, B: C^n -> C^n`` with declared degrees ``k`` (of A) and ``l`` (of B).

    ``homogeneous=False`` marks problems known not to scale (Gross-Pitaevskii
    with ``beta > 0``); degree-dependent operations refuse them.
    ``quotient`` optionally carries a known real quotient f/g whose
    co-gradient gives the problem.
    """
    A: Callable
    B: Callable
    k: float
    l: float
    n: int
    name: str = "problem"
    homogeneous: bool = True
    quotient: Optional[Callable] = field(default=None, compare=False)

    def evaluate(self, z):
        a = np.asarray(self.A(z), dtype=complex)
        b = np.asarray(self.B(z), dtype=complex)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise EvaluationError("problem maps returned non-finite values", z=np.array(z))
        return a, b


class HomogeneityCheck(NamedTuple):
    verdict: bool
    k: float
    l: float


@dataclass
class GradientVerdict:
    """Outcome of :func:`is_gradient_problem`.

    A true verdict means the samples are consistent with gradient structure;
    it is numerical evidence, not a proof.
    """
    is_gradient: bool
    max_relative_mismatch_A: float
    max_relative_mismatch_B: float
    samples_used: int
    g_vanishes_on_sphere: bool
    witness: Optional[np.ndarray] = None


def _require_homogeneous(problem):
    if not problem.homogeneous:
        raise NonHomogeneousError(f"{problem.name} is not homogeneous")


def _slope(radii, norms):
    x = np.log(radii)
    y = np.log(norms)
    return float(np.polyfit(x, y, 1)[0])


def check_homogeneity(problem, num_samples=20, tol=1e-8, seed=0):
    """Test the declared degrees on random unit vectors and random ``alpha = r e^{i t}``.

    Returns ``(verdict, k_est, l_est)``; degree estimates are the mean
    least-squares slopes of ``log ||A(r z)||`` against ``log r``. A map that
    vanishes on every sample gets estimate ``nan`` and is not held against
    the verdict.
    """
    if num_samples < 1:
        raise PreconditionError("num_samples must be at least 1")
    rng = make_rng(seed)
    ok = True
    ks, ls = [], []
    radii = np.array(DEGREE_RADII)
    for _ in range(num_samples):
        z = random_unit(problem.n, rng)
        r = rng.uniform(0.5, 2.0)
        theta = rng.uniform(0, 2 * np.pi)
        ph = np.exp(1j * theta)
        a1, b1 = problem.evaluate(r * ph * z)
        a2, b2 = problem.evaluate(ph * z)
        if np.linalg.norm(a1 - r ** problem.k * a2) > tol * np.linalg.norm(a1):
            ok = False
        if np.linalg.norm(b1 - r ** problem.l * b2) > tol * np.linalg.norm(b1):
            ok = False
        na, nb = [], []
        for rr in radii:
            a, b = problem.evaluate(rr * z)
            na.append(np.linalg.norm(a))
            nb.append(np.linalg.norm(b))
        if min(na) > 0:
            ks.append(_slope(radii, na))
        if min(nb) > 0:
            ls.append(_slope(radii, nb))
    k_est = float(np.mean(ks)) if ks else float("nan")
    l_est = float(np.mean(ls)) if ls else float("nan")
    for est, declared in ((k_est, problem.k), (l_est, problem.l)):
        if np.isfinite(est) and abs(est - declared) > DEGREE_TOL:
            ok = False
    return HomogeneityCheck(ok, k_est, l_est)


def homogenize(problem):
    """Equalize degrees by a power of ``||z||``.

    For ``k > l`` the problem becomes ``A = lam ||z||^{k-l} B``; for
    ``k < l`` the factor ``||z||^{l-k}`` multiplies ``A`` instead. Eigenpairs
    on the unit sphere are unchanged.
    """
    _require_homogeneous(problem)
    k, l = problem.k, problem.l
    if k == l:
        return problem
    A, B = problem.A, problem.B
    if k > l:
        e = k - l
        return replace(problem, B=lambda z: np.linalg.norm(z) ** e * B(z), l=k,
                       name=f"homogenized({problem.name})", quotient=None)
    e = l - k
    return replace(problem, A=lambda z: np.linalg.norm(z) ** e * A(z), k=l,
                   name=f"homogenized({problem.name})", quotient=None)


def trial_quotient(problem, z, vanish_tol=G_VANISH_TOL):
    """Re(A(z), z) / Re(B(z), z)."""
    _require_homogeneous(problem)
    z = as_vector(z, problem.n, "z")
    a, b = problem.evaluate(z)
    den = np.vdot(z, b).real
    if abs(den) <= vanish_tol * np.linalg.norm(b) * np.linalg.norm(z):
        raise DegenerateError("Re(B(z), z) vanishes: z is near the zero set of g", endpoint="inf")
    return float(np.vdot(z, a).real / den)


def wirtinger_gradient(f, z, h=FD_STEP):
    """Central-difference conjugate co-gradient ``df/dz̄ = (df/dx + i df/dy) / 2``."""
    if h <= 0:
        raise PreconditionError("h must be positive")
    z = np.asarray(z, dtype=complex)
    g = np.empty(z.shape, dtype=complex)
    e = np.zeros(z.shape, dtype=complex)
    for j in range(z.size):
        e[j] = h
        fx = f(z + e) - f(z - e)
        e[j] = 1j * h
        fy = f(z + e) - f(z - e)
        e[j] = 0
        if not (np.isfinite(fx) and np.isfinite(fy)):
            raise EvaluationError("non-finite function value in finite differences", z=z.copy())
        g[j] = 0.5 * (fx + 1j * fy) / (2 * h)
    return g


def euler_potentials(problem, z):
    """Reconstructed real potentials ``f = 2 Re(A, z)/(k+1)`` and ``g = 2 Re(B, z)/(l+1)``."""
    a, b = problem.evaluate(z)
    f = 2 * np.vdot(z, a).real / (problem.k + 1)
    g = 2 * np.vdot(z, b).real / (problem.l + 1)
    return float(f), float(g)


def is_gradient_problem(problem, num_samples=10, h=FD_STEP, tol=GRADIENT_TOL, seed=0,
                        vanish_tol=G_VANISH_TOL):
    """Decide whether ``A`` and ``B`` are co-gradients of the Euler potentials.

    Compares finite-difference co-gradients of ``f`` and ``g`` (see
    :func:`euler_potentials`) with ``A`` and ``B`` at random unit samples.
    Also searches the sphere for points where ``Re(B(z), z)`` nearly
    vanishes and reports one as ``witness``.

    A problem differing from a gradient problem by a map ``T`` with
    ``Re(T(z), z) = 0`` for all z is still caught, because the mismatch
    ``||grad f - A||`` sees ``T`` directly.
    """
    _require_homogeneous(problem)
    if num_samples < 1:
        raise PreconditionError("num_samples must be at least 1")
    rng = make_rng(seed)
    mis_a = mis_b = 0.0
    ratios = []
    samples = []
    for _ in range(num_samples):
        z = random_unit(problem.n, rng)
        a, b = problem.evaluate(z)
        ga = wirtinger_gradient(lambda x: euler_potentials(problem, x)[0], z, h)
        gb = wirtinger_gradient(lambda x: euler_potentials(problem, x)[1], z, h)
        mis_a = max(mis_a, np.linalg.norm(ga - a) / max(np.linalg.norm(a), np.finfo(float).tiny))
        mis_b = max(mis_b, np.linalg.norm(gb - b) / max(np.linalg.norm(b), np.finfo(float).tiny))
        ratios.append(_g_ratio(problem, z))
        samples.append(z)

    witness = _search_g_zero(problem, samples, ratios, vanish_tol)
    return GradientVerdict(is_gradient=bool(mis_a <= tol and mis_b <= tol),
                           max_relative_mismatch_A=float(mis_a),
                           max_relative_mismatch_B=float(mis_b),
                           samples_used=num_samples,
                           g_vanishes_on_sphere=witness is not None,
                           witness=witness)


def _g_ratio(problem, z):
    _, b = problem.evaluate(z)
    nb = np.linalg.norm(b) * np.linalg.norm(z)
    return abs(np.vdot(z, b).real) / nb if nb > 0 else 0.0


def _search_g_zero(problem, samples, ratios, vanish_tol, polish=3):
    n = problem.n
    order = np.argsort(ratios)
    for i in order[:polish]:
        if ratios[i] <= vanish_tol:
            return samples[i]

        def obj(x):
            z = x[:n] + 1j * x[n:]
            return _g_ratio(problem, z / np.linalg.norm(z)) ** 2

        z0 = samples[i]
        res = optimize.minimize(obj, np.concatenate([z0.real, z0.imag]), method="Nelder-Mead",
                                options={"xatol": 1e-12, "fatol": 1e-24, "maxiter": 400 * n})
        z = res.x[:n] + 1j * res.x[n:]
        z = z / np.linalg.norm(z)
        if _g_ratio(problem, z) <= vanish_tol:
            return z
    return None


def _ab_or_raise(problem, z, atol):
    a, b = problem.evaluate(z)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na <= atol:
        raise DegenerateError("A(z) vanishes: candidate eigenvalue 0", endpoint="0")
    if nb <= atol:
        raise DegenerateError("B(z) vanishes: candidate eigenvalue infinity", endpoint="inf")
    return a, b, na, nb


def cauchy_schwarz_quotient(problem, z, atol=1e-14):
    """|(A, B)|^2 / (||A||^2 ||B||^2), in [0, 1]."""
    z = as_vector(z, problem.n, "z")
    a, b, na, nb = _ab_or_raise(problem, z, atol * max(1.0, np.linalg.norm(z)))
    c = np.vdot(b, a)
    return float(min(1.0, abs(c) ** 2 / (na * na * nb * nb)))


def cauchy_schwarz_defect(problem, z, atol=1e-14):
    """1 - cauchy_schwarz_quotient(z), computed without cancellation.

    Equals ``||A - ((A, B) / ||B||^2) B||^2 / ||A||^2``.
    """
    z = as_vector(z, problem.n, "z")
    a, b, na, nb = _ab_or_raise(problem, z, atol * max(1.0, np.linalg.norm(z)))
    perp = a - (np.vdot(b, a) / (nb * nb)) * b
    return float(min(1.0, (np.linalg.norm(perp) / na) ** 2))


def nonlinear_optimal_quotient(problem, z, phase_tol=1e-13, atol=1e-14):
    """Phase of (A, B) times ||A|| / ||B||."""
    z = as_vector(z, problem.n, "z")
    a, b, na, nb = _ab_or_raise(problem, z, atol * max(1.0, np.linalg.norm(z)))
    c = np.vdot(b, a)
    if abs(c) <= phase_tol * na * nb:
        raise UndefinedPhaseError("(A(z), B(z)) vanishes", na / nb)
    return complex(c / abs(c) * na / nb)


def residual(problem, z, lam):
    """||A(z) - lam B(z)|| / max(||A(z)||, |lam| ||B(z)||); zero when both sides vanish."""
    a, b = problem.evaluate(as_vector(z, problem.n, "z"))
    scale = max(np.linalg.norm(a), abs(lam) * np.linalg.norm(b))
    r = np.linalg.norm(a - lam * b)
    return float(r / scale) if scale > 0 else float(r)


@dataclass
class CSAscentResult:
    z: np.ndarray
    value: float
    trace: object
    converged: bool
    status: str
    iterations: int


def cs_ascent(problem, z0, max_iter=500, tol=1e-16, step_control=None, gradient=None, h=FD_STEP):
    """Maximize the Cauchy-Schwarz quotient over the unit sphere.

    The search descends on :func:`cauchy_schwarz_defect` (``1 - q``), which
    keeps full relative precision near eigenvectors; the trace records
    ``q``. Uses finite-difference co-gradients unless ``gradient`` (of the
    defect) is given. ``step_control`` is an optional dict with keys
    ``first_step`` and ``gtol`` forwarded to the line search. Stops when
    ``1 - q <= tol``, when the co-gradient vanishes, or after ``max_iter``
    steps. If the quotient becomes undefined the last good iterate is
    returned with status ``"degenerate"``.
    """
    opts = {"first_step": 0.1, "gtol": 1e-12}
    opts.update(step_control or {})
    z0 = as_vector(z0, problem.n, "z0")
    cauchy_schwarz_quotient(problem, z0)

    def f(z):
        return cauchy_schwarz_defect(problem, z)

    grad = gradient or (lambda z: wirtinger_gradient(f, z, h))
    last_good = {"z": z0 / np.linalg.norm(z0)}

    def record(z, val, g):
        last_good["z"] = z
        return {"objective": 1.0 - val, "cs_quotient": 1.0 - val}

    try:
        res = sphere_ascent(f, grad, z0, maximize=False, max_iter=max_iter, gtol=opts["gtol"],
                            stop=lambda v: v <= tol, first_step=opts["first_step"],
                            record=record)
    except DegenerateError:
        z = last_good["z"]
        return CSAscentResult(z, 1.0 - f(z), None, False, "degenerate", 0)
    return CSAscentResult(res.z, 1.0 - res.value, res.trace, res.converged, res.status,
                          res.iterations)


class EmptinessScan(NamedTuple):
    bound: float
    best_z: Optional[np.ndarray]
    starts_used: int
    starts_discarded: int


def spectral_emptiness_scan(problem, num_samples=20, ascent_iters=200, seed=0, tol=1e-16):
    """Multi-start Cauchy-Schwarz ascent; see :func:`spectral_emptiness_bound`."""
    _require_homogeneous(problem)
    rng = make_rng(seed)
    best, best_z, used, dropped = -1.0, None, 0, 0
    for _ in range(num_samples):
        z0 = random_unit(problem.n, rng)
        try:
            res = cs_ascent(problem, z0, max_iter=ascent_iters, tol=tol)
        except DegenerateError:
            dropped += 1
            continue
        used += 1
        if res.value > best:
            best, best_z = res.value, res.z
        if res.status == "target":
            break
    return EmptinessScan(float(max(best, 0.0)) if used else float("nan"), best_z, used, dropped)


def spectral_emptiness_bound(problem, num_samples=20, ascent_iters=200, seed=0):
    """Largest Cauchy-Schwarz quotient found from ``num_samples`` random starts.

    Values bounded away from one indicate that the spectrum has no points
    away from 0 and infinity.
    """
    return spectral_emptiness_scan(problem, num_samples, ascent_iters, seed).bound


def refine_eigenpair(problem, z0, lam0=None, max_nfev=200):
    """Polish an approximate eigenpair by nonlinear least squares.

    Solves ``A(z) - lam B(z) = 0`` with ``||z|| = 1`` over real and imaginary
    parts of ``z`` and ``lam``. Returns ``(lam, z, residual)``.
    """
    n = problem.n
    z0 = as_vector(z0, n, "z0")
    z0 = z0 / np.linalg.norm(z0)
    if lam0 is None:
        lam0 = nonlinear_optimal_quotient(problem, z0)
    a0, _ = problem.evaluate(z0)
    scale = max(np.linalg.norm(a0), 1e-300)

    def unpack(x):
        return x[:n] + 1j * x[n:2 * n], x[2 * n] + 1j * x[2 * n + 1]

    def fun(x):
        z, lam = unpack(x)
        a, b = problem.evaluate(z)
        r = (a - lam * b) / scale
        return np.concatenate([r.real, r.imag, [np.vdot(z, z).real - 1.0]])

    x0 = np.concatenate([z0.real, z0.imag, [lam0.real, lam0.imag]])
    sol = optimize.least_squares(fun, x0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                                 max_nfev=max_nfev)
    z, lam = unpack(sol.x)
    z = z / np.linalg.norm(z)
    return complex(lam), z, residual(problem, z, lam)


# ---------------------------------------------------------------------------
# problem constructors

def make_linear_pencil_problem(M, N=None):
    M = as_matrix(M, "M")
    N = np.eye(M.shape[0], dtype=complex) if N is None else as_matrix(N, "N")
    if M.shape != N.shape:
        raise DimensionError(f"M is {M.shape} but N is {N.shape}")
    return HomogeneousProblem(lambda z: M @ z, lambda z: N @ z, 1.0, 1.0, M.shape[0], "pencil")


def make_rlinear(M, T):
    """M z + T z̄ = lam z."""
    M = as_matrix(M, "M")
    T = as_matrix(T, "T")
    if M.shape != T.shape:
        raise DimensionError(f"M is {M.shape} but T is {T.shape}")
    return HomogeneousProblem(lambda z: M @ z + T @ np.conj(z), lambda z: np.asarray(z, dtype=complex),
                              1.0, 1.0, M.shape[0], "rlinear")


def make_linear_system_problem(M, b, homogenized=False):
    """M z = lam b, or M z = lam ||z|| b when ``homogenized``."""
    M = as_matrix(M, "M")
    b = as_vector(b, M.shape[0], "b")
    if homogenized:
        return HomogeneousProblem(lambda z: M @ z, lambda z: np.linalg.norm(z) * b,
                                  1.0, 1.0, M.shape[0], "linsys-homogenized")
    return HomogeneousProblem(lambda z: M @ z, lambda z: b.copy(), 1.0, 0.0, M.shape[0], "linsys")


def make_gross_pitaevskii(M, beta):
    """M z + beta |z|^2 o z = lam z, flagged non-homogeneous for ``beta != 0``.

    ``quotient`` evaluates ``((M z, z) + beta/2 (|z|^2, |z|^2)) / (z, z)``,
    the real quotient whose co-gradient gives the problem.
    """
    M = as_matrix(M, "M")
    beta = float(beta)

    def A(z):
        return M @ z + beta * np.abs(z) ** 2 * z

    def quotient(z):
        z = np.asarray(z, dtype=complex)
        m2 = np.abs(z) ** 2
        return float((np.vdot(z, M @ z).real + 0.5 * beta * np.dot(m2, m2)) / np.vdot(z, z).real)

    return HomogeneousProblem(A, lambda z: np.asarray(z, dtype=complex), 1.0, 1.0, M.shape[0],
                              "gp", homogeneous=(beta == 0.0), quotient=quotient)


def cs_stationarity_check_standard(M, z):
    """Defect of the Cauchy-Schwarz stationarity equation for the standard problem.

    Returns ``||(rq(z) M^* + conj(rq(z)) M - M^* M) z - rq_{M^*M}(z) z||`` for
    unit ``z``, where ``rq`` is the Rayleigh quotient; it vanishes at
    eigenvectors of normal ``M``.
    """
    M = as_matrix(M, "M")
    z = as_vector(z, M.shape[0], "z")
    z = z / np.linalg.norm(z)
    Mz = M @ z
    rq = np.vdot(z, Mz)
    MhMz = M.conj().T @ Mz
    rq2 = np.vdot(z, MhMz)
    lhs = rq * (M.conj().T @ z) + np.conj(rq) * Mz - MhMz
    return float(np.linalg.norm(lhs - rq2 * z))
