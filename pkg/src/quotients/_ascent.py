"""Projected gradient ascent/descent on the unit sphere of C^n.

Gradients are conjugate co-gradients ``g = df/dz̄``; the real directional
derivative of ``f`` along ``d`` is ``2 Re(g^* d)``. Steps use a
Barzilai-Borwein trial length followed by Armijo backtracking (halving), and
each accepted iterate is renormalized, so the objective sequence is monotone
up to roundoff: once objective changes fall below ``NOISE * |f|``, a step is
also accepted when it shrinks the co-gradient.
"""
from dataclasses import dataclass

import numpy as np

from .trace import ConvergenceTrace, TraceRecord

ARMIJO = 1e-4
MAX_HALVINGS = 60
NOISE = 64 * np.finfo(float).eps


@dataclass
class AscentResult:
    z: np.ndarray
    value: float
    trace: ConvergenceTrace
    converged: bool
    status: str
    iterations: int


def _tangent(z, g):
    return g - np.vdot(z, g).real * z


def sphere_ascent(f, grad, z0, maximize=True, max_iter=500, gtol=1e-10,
                  stop=None, first_step=0.1, stall_gtol=1e-6, record=None):
    """Monotone line-search ascent (``maximize``) or descent on ``f`` over ``||z|| = 1``.

    Convergence when the tangent co-gradient satisfies ``||g_t|| <= gtol * |f|``;
    a failed line search counts as converged only if
    ``||g_t|| <= stall_gtol * |f|``.
    ``stop(value)`` may end the run early (counted as converged).
    ``record(z, value, g)`` may return fields overriding or extending the trace record.
    """
    sign = 1.0 if maximize else -1.0
    z = np.asarray(z0, dtype=complex)
    z = z / np.linalg.norm(z)
    val = f(z)
    trace = ConvergenceTrace()
    z_prev = g_prev = None
    status, converged, it = "max_iter", False, 0

    def scale(v):
        return max(abs(v), np.finfo(float).tiny)

    for it in range(max_iter + 1):
        g = _tangent(z, grad(z))
        gn = np.linalg.norm(g)
        fields = {"objective": float(val), "grad_norm": float(gn)}
        if record:
            fields.update(record(z, val, g))
        trace.append(TraceRecord(it, **fields))
        if stop is not None and stop(val):
            status, converged = "target", True
            break
        if gn <= gtol * scale(val) or gn == 0:
            status, converged = "stationary", True
            break
        if it == max_iter:
            break
        d = sign * g
        if z_prev is None:
            t = first_step / gn
        else:
            s = z - z_prev
            y = g - g_prev
            sy = abs(np.vdot(s, y).real)
            t = np.vdot(s, s).real / sy if sy > 0 else first_step / gn
            t = min(t, 1.0 / gn)
        slope = 2 * gn ** 2
        noise = NOISE * abs(val)
        for _ in range(MAX_HALVINGS):
            znew = z + t * d
            znew = znew / np.linalg.norm(znew)
            try:
                vnew = f(znew)
            except ArithmeticError:
                vnew = np.nan
            if np.isfinite(vnew) and sign * (vnew - val) >= ARMIJO * t * slope:
                break
            # objective changes are below roundoff: accept if the gradient shrinks
            if (np.isfinite(vnew) and abs(vnew - val) <= noise
                    and np.linalg.norm(_tangent(znew, grad(znew))) < 0.9 * gn):
                break
            t *= 0.5
        else:
            converged = bool(gn <= stall_gtol * scale(val))
            status = "stalled"
            break
        z_prev, g_prev = z, g
        z, val = znew, vnew
    return AscentResult(z, float(val), trace, converged, status, it)
