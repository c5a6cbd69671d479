"""Command-line front end.

Every invocation is captured in a :class:`RunConfig`, echoed into the JSON
report, and can be replayed with ``quotients --replay report.json``. Exit
status: 0 on success or convergence, 2 on flagged non-convergence, 1 on
errors (diagnostic on standard error).
"""
import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from . import mmio
from ._linalg import hermitian_part_defect, make_rng
from .errors import QuotientError
from .folded import folded_iterate
from .generators import (random_fem_saddle, random_hermitian_pencil,
                         random_quadratic_linearized)
from .homogeneous import (check_homogeneity, cs_ascent, is_gradient_problem,
                          make_gross_pitaevskii, make_linear_pencil_problem,
                          make_linear_system_problem, make_rlinear, refine_eigenpair,
                          spectral_emptiness_scan)
from .oracle import dense_generalized_eig, plap_2x2_solve, svd_oracle
from .pencil import (HermitianPencil, fem_saddle_inner_product, fold, is_hermitian_pencil,
                     pencil_sqrt)
from .plaplacian import (RESIDUAL_TOL, PLaplacianProblem, deflated_extremum, deflation_basis,
                         p_extreme_multistart, phi_p)

COMMANDS = ("check", "solve-folded", "fold", "sqrt", "plap", "cs", "oracle", "bench")
SCHEMA_VERSION = 1
EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2
CS_TARGET = 1 - 1e-6


@dataclass
class RunConfig:
    """Serializable description of one run: command, input files, parameters, outputs."""
    command: str
    inputs: Dict[str, str] = field(default_factory=dict)
    params: Dict[str, Any] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    report: Optional[str] = None
    trace: Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = d.get("config", d)
        return cls(**{k: d[k] for k in ("command", "inputs", "params", "outputs", "report", "trace")
                      if k in d})


# ---------------------------------------------------------------------------
# JSON helpers

def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _cplx(z):
    z = complex(z)
    return {"re": _num(z.real), "im": _num(z.imag)}


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


class _Outcome:
    def __init__(self, results, converged=None, trace=None):
        self.results = results
        self.converged = converged
        self.trace = trace


def _require(cfg, *names):
    missing = [n for n in names if not cfg.inputs.get(n)]
    if missing:
        raise ValueError(f"{cfg.command}: missing input(s) {', '.join('--' + m for m in missing)}")


def _mat(cfg, name):
    return mmio.read_matrix(cfg.inputs[name])


def _write_outputs(cfg, mats):
    coordinate = cfg.params.get("format") == "coordinate"
    written = {}
    for key, a in mats.items():
        path = cfg.outputs.get(key)
        if path:
            mmio.write_matrix(path, a, coordinate=coordinate)
            written[key] = path
    return written


def _pencil(cfg):
    _require(cfg, "M", "N")
    M, N = _mat(cfg, "M"), _mat(cfg, "N")
    P, weight = None, "identity"
    if cfg.inputs.get("P"):
        P, weight = _mat(cfg, "P"), "file"
    elif cfg.params.get("saddle_split"):
        n1 = int(cfg.params["saddle_split"])
        if not 0 < n1 < M.shape[0]:
            raise ValueError("--saddle-split must lie strictly between 0 and n")
        P = fem_saddle_inner_product(M[:n1, :n1], M[:n1, n1:], M[n1:, n1:], N[n1:, n1:])
        weight = "fem-saddle"
    return HermitianPencil(M, N, P), weight


# ---------------------------------------------------------------------------
# commands

def _cmd_check(cfg):
    pencil, weight = _pencil(cfg)
    C = pencil.N.conj().T @ pencil.weigh(pencil.M)
    tol = cfg.params.get("tol") or 1e-10
    return _Outcome({"n": pencil.n, "weight": weight,
                     "hermitian": bool(is_hermitian_pencil(pencil, tol)),
                     "hermitian_defect": _num(hermitian_part_defect(C))})


def _cmd_solve_folded(cfg):
    pencil, weight = _pencil(cfg)
    prm = cfg.params
    z0 = mmio.read_vector(cfg.inputs["z0"]) if cfg.inputs.get("z0") else None
    res = folded_iterate(pencil, prm["mu"], z0=z0, max_iter=prm.get("max_iter", 200),
                         tol=prm.get("tol", 1e-10), restart_every=prm.get("restart_every"),
                         seed=prm.get("seed", 0))
    if cfg.outputs.get("z"):
        mmio.write_vector(cfg.outputs["z"], res.z)
    last = res.trace.records[-1]
    return _Outcome({"n": pencil.n, "weight": weight, "lambda": _cplx(res.eigenvalue),
                     "converged": bool(res.converged), "iterations": res.iterations,
                     "folded_objective": _num(res.folded_value), "residual": _num(last.residual),
                     "phase_defined": bool(res.phase_defined)},
                    converged=res.converged, trace=res.trace)


def _cmd_fold(cfg):
    pencil, weight = _pencil(cfg)
    folded = fold(pencil, cfg.params["mu"])
    written = _write_outputs(cfg, {"M": folded.M, "N": folded.N})
    return _Outcome({"n": pencil.n, "weight": weight, "written": written})


def _cmd_sqrt(cfg):
    _require(cfg, "A", "B")
    A, B = _mat(cfg, "A"), _mat(cfg, "B")
    root = pencil_sqrt(A, B)
    folded = fold(HermitianPencil(root.M, root.N), 0.0)
    cols = np.column_stack([x.reshape(-1) for x in (A, B, folded.M, folded.N)])
    s = np.linalg.svd(cols, compute_uv=False)
    written = _write_outputs(cfg, {"M": root.M, "N": root.N, "X": root.X})
    return _Outcome({"n": A.shape[0], "span_singular_values": [_num(x) for x in s],
                     "span_rank_ratio": _num(s[2] / s[0]),
                     "lambda1": [_num(x) for x in root.lambda1], "written": written})


def _plap_residual(M, p, z, lam):
    r = M.conj().T @ phi_p(M @ z, p) - lam * phi_p(z, p)
    return float(np.linalg.norm(r) / (np.linalg.norm(M) ** (p - 1) * np.linalg.norm(z) ** (p - 1)))


def _cmd_plap(cfg):
    _require(cfg, "matrix")
    prm = cfg.params
    M = _mat(cfg, "matrix")
    p = float(prm["p"])
    problem = PLaplacianProblem.simple(M, p)
    direction = prm.get("direction", "max")
    seed = prm.get("seed", 0)
    kw = {"max_iter": prm.get("max_iter", 2000), "tol": prm.get("tol", 1e-10)}
    best = p_extreme_multistart(problem, direction, starts=prm.get("starts", 8), seed=seed, **kw)
    res = _plap_residual(M, p, best.z, best.eigenvalue)
    out = {"n": problem.n, "p": p, "direction": direction,
           "lambda": _cplx(best.eigenvalue), "iterations": best.iterations,
           "converged": bool(best.converged), "status": best.status, "residual": _num(res),
           "classification": "eigenpair" if res <= RESIDUAL_TOL else "unconverged",
           "deflated": None}
    converged = best.converged
    if prm.get("deflate_after_first"):
        W = deflation_basis(best.z, p)
        d = deflated_extremum(problem, W, direction, seed=seed, u=best.z)
        out["deflated"] = {"lambda": _cplx(d.eigenvalue), "classification": d.classification,
                           "residual": _num(d.residual),
                           "angle": None if d.angle is None else _num(d.angle),
                           "converged": bool(d.converged)}
        converged = converged and d.converged
    return _Outcome(out, converged=converged, trace=best.trace)


def _cs_problem(cfg):
    prm = cfg.params
    kind = prm.get("problem")
    if kind == "rlinear":
        _require(cfg, "M", "T")
        return make_rlinear(_mat(cfg, "M"), _mat(cfg, "T"))
    if kind == "linsys":
        _require(cfg, "M", "b")
        return make_linear_system_problem(_mat(cfg, "M"), mmio.read_vector(cfg.inputs["b"]),
                                          homogenized=bool(prm.get("homogenized")))
    if kind == "gp":
        _require(cfg, "M")
        return make_gross_pitaevskii(_mat(cfg, "M"), prm.get("beta", 0.0))
    if kind == "plap":
        _require(cfg, "M")
        return PLaplacianProblem.simple(_mat(cfg, "M"), float(prm["p"])).as_homogeneous()
    if kind == "pencil":
        _require(cfg, "M")
        N = _mat(cfg, "N") if cfg.inputs.get("N") else None
        return make_linear_pencil_problem(_mat(cfg, "M"), N)
    raise ValueError(f"unknown cs problem {kind!r}")


def _cmd_cs(cfg):
    prm = cfg.params
    problem = _cs_problem(cfg)
    seed = prm.get("seed", 0)
    starts, iters = prm.get("starts", 20), prm.get("max_iter", 200)
    out = {"problem": problem.name, "n": problem.n, "homogeneous": bool(problem.homogeneous),
           "homogeneity": None, "gradient": None, "emptiness_bound": None, "estimate": None}
    trace = None
    if problem.homogeneous:
        h = check_homogeneity(problem, seed=seed)
        out["homogeneity"] = {"verdict": bool(h.verdict), "k": _num(h.k), "l": _num(h.l)}
        if problem.k == problem.l:
            g = is_gradient_problem(problem, seed=seed)
            out["gradient"] = {"is_gradient": bool(g.is_gradient),
                               "max_relative_mismatch_A": _num(g.max_relative_mismatch_A),
                               "max_relative_mismatch_B": _num(g.max_relative_mismatch_B),
                               "g_vanishes_on_sphere": bool(g.g_vanishes_on_sphere)}
        scan = spectral_emptiness_scan(problem, starts, iters, seed)
        out["emptiness_bound"] = _num(scan.bound)
        best_z, best_q = scan.best_z, scan.bound
    else:
        rng = make_rng(seed)
        best_z, best_q = None, -1.0
        for _ in range(starts):
            r = cs_ascent(problem, rng.standard_normal(problem.n)
                          + 1j * rng.standard_normal(problem.n), max_iter=iters)
            if r.value > best_q:
                best_z, best_q, trace = r.z, r.value, r.trace
            if r.status == "target":
                break
    if best_z is not None and best_q >= CS_TARGET:
        lam, z, res = refine_eigenpair(problem, best_z)
        out["estimate"] = {"lambda": _cplx(lam), "residual": _num(res),
                           "cs_quotient": _num(best_q)}
    if trace is None and best_z is not None:
        trace = cs_ascent(problem, best_z, max_iter=0).trace
    return _Outcome(out, trace=trace)


def _cmd_oracle(cfg):
    kind = cfg.params.get("kind")
    if kind == "eig":
        _require(cfg, "A")
        B = _mat(cfg, "B") if cfg.inputs.get("B") else None
        pairs = dense_generalized_eig(_mat(cfg, "A"), B).sorted()
        return _Outcome({"kind": kind, "eigenvalues": [_cplx(x) for x in pairs.eigenvalues],
                         "flags": list(pairs.condition_flags)})
    if kind == "svd":
        _require(cfg, "A")
        s = svd_oracle(_mat(cfg, "A")).s
        return _Outcome({"kind": kind, "singular_values": [_num(x) for x in s],
                         "squared": [_num(x * x) for x in s]})
    if kind == "plap2x2":
        _require(cfg, "M")
        M = _mat(cfg, "M")
        M2 = _mat(cfg, "M2") if cfg.inputs.get("M2") else M
        pairs = plap_2x2_solve(M, M2, float(cfg.params["p"]))
        return _Outcome({"kind": kind, "eigenvalues": [_cplx(x) for x in pairs.eigenvalues],
                         "coverage": pairs.coverage})
    raise ValueError(f"unknown oracle kind {kind!r}")


BENCH_COLUMNS = ("family", "n", "instance", "mu", "iterations", "converged", "lambda_re",
                 "lambda_im", "oracle_lambda", "abs_error", "hermitian")


def _bench_instance(family, n, seed):
    if family == "random-hermitian-pencil":
        pencil, _ = random_hermitian_pencil(n, seed)
        return pencil, True
    if family == "fem-saddle":
        n2 = n // 2
        pencil, _ = random_fem_saddle(n - n2, n2, seed)
        return pencil, True
    if family == "quadratic-linearized":
        if n % 2:
            raise ValueError("quadratic-linearized sizes must be even")
        pencil, flag, _ = random_quadratic_linearized(n // 2, seed)
        return pencil, flag
    if family == "identity":
        return HermitianPencil(np.eye(n), np.eye(n)), True
    raise ValueError(f"unknown bench family {family!r}")


def bench(cfg):
    """Folded iteration across sizes and shifts, compared with the dense oracle."""
    prm = cfg.params
    family = prm.get("family")
    rng = make_rng(prm.get("seed", 0))
    rows = []
    for n in prm.get("sizes") or [16]:
        for inst in range(prm.get("instances", 2)):
            pencil, flag = _bench_instance(family, int(n), int(rng.integers(2 ** 31)))
            ev = dense_generalized_eig(pencil.M, pencil.N).finite().eigenvalues.real
            ev = np.sort(ev)
            gaps = np.flatnonzero(np.diff(ev) > 1e-8 * max(1.0, np.abs(ev).max()))
            for _ in range(prm.get("shifts", 3)):
                if gaps.size:
                    i = int(rng.choice(gaps))
                    mu = float(ev[i] + rng.uniform(0.1, 0.4) * (ev[i + 1] - ev[i]))
                else:
                    mu = float(ev[0] + rng.uniform(-1, 1))
                res = folded_iterate(pencil, mu, max_iter=prm.get("max_iter", 400),
                                     tol=prm.get("tol", 1e-10), seed=int(rng.integers(2 ** 31)))
                near = float(ev[np.argmin(np.abs(ev - mu))])
                rows.append({"family": family, "n": int(n), "instance": inst, "mu": mu,
                             "iterations": res.iterations, "converged": bool(res.converged),
                             "lambda_re": float(res.eigenvalue.real),
                             "lambda_im": float(res.eigenvalue.imag),
                             "oracle_lambda": near,
                             "abs_error": float(abs(res.eigenvalue - near)),
                             "hermitian": bool(flag and pencil.hermitian)})
    return rows


def _bench_csv(rows):
    lines = [",".join(BENCH_COLUMNS)]
    for r in rows:
        lines.append(",".join(repr(r[c]) if isinstance(r[c], float) else str(r[c])
                              for c in BENCH_COLUMNS))
    return "\n".join(lines) + "\n"


def _cmd_bench(cfg):
    rows = bench(cfg)
    if cfg.outputs.get("csv"):
        mmio.atomic_write_text(cfg.outputs["csv"], _bench_csv(rows))
    converged = all(r["converged"] for r in rows)
    return _Outcome({"family": cfg.params.get("family"), "runs": len(rows),
                     "converged_runs": sum(r["converged"] for r in rows),
                     "max_abs_error": _num(max((r["abs_error"] for r in rows), default=0.0)),
                     "all_hermitian": all(r["hermitian"] for r in rows),
                     "rows": [{k: (_num(v) if isinstance(v, float) else v) for k, v in r.items()}
                              for r in rows]},
                    converged=converged)


DISPATCH = {"check": _cmd_check, "solve-folded": _cmd_solve_folded, "fold": _cmd_fold,
            "sqrt": _cmd_sqrt, "plap": _cmd_plap, "cs": _cmd_cs, "oracle": _cmd_oracle,
            "bench": _cmd_bench}


def _validate(cfg):
    prm = cfg.params
    if "p" in prm and prm["p"] is not None and not prm["p"] > 1:
        raise ValueError("p must exceed 1")
    if "tol" in prm and prm["tol"] is not None and not prm["tol"] > 0:
        raise ValueError("tol must be positive")
    for key in ("max_iter", "starts"):
        if prm.get(key) is not None and prm[key] < 0:
            raise ValueError(f"{key} must be non-negative")


def execute(cfg):
    """Run ``cfg`` and return ``(exit_code, report)``; errors propagate."""
    _validate(cfg)
    outcome = DISPATCH[cfg.command](cfg)
    if outcome.converged is None:
        status, code = "ok", EXIT_OK
    elif outcome.converged:
        status, code = "converged", EXIT_OK
    else:
        status, code = "not_converged", EXIT_NOT_CONVERGED
    report = {"schema_version": SCHEMA_VERSION, "command": cfg.command, "status": status,
              "exit_code": code, "config": cfg.to_dict(), "results": outcome.results}
    if cfg.trace and outcome.trace is not None:
        mmio.atomic_write_text(cfg.trace, outcome.trace.to_csv())
    return code, report


def run(cfg, stdout=None, stderr=None):
    """Execute, emit the report, and map failures to exit code 1."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        code, report = execute(cfg)
    except (QuotientError, ValueError, ArithmeticError, OSError, np.linalg.LinAlgError) as exc:
        print(f"quotients {cfg.command}: error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_ERROR
    text = _dumps(report)
    if cfg.report:
        mmio.atomic_write_text(cfg.report, text)
    else:
        stdout.write(text)
    return code


# ---------------------------------------------------------------------------
# argument parsing

def _sizes(text):
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser():
    ap = argparse.ArgumentParser(prog="quotients", description=__doc__.splitlines()[0])
    ap.add_argument("--replay", metavar="JSON", help="rerun the config stored in a report or config file")
    sub = ap.add_subparsers(dest="command")

    def common(sp, trace=False):
        sp.add_argument("--report", help="write the JSON report here instead of stdout")
        if trace:
            sp.add_argument("--trace", help="CSV convergence trace")
        sp.add_argument("--seed", type=int, default=0)

    def pencil_inputs(sp):
        sp.add_argument("--M", required=True)
        sp.add_argument("--N", required=True)
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--P", help="Hermitian positive definite weight")
        g.add_argument("--saddle-split", type=int, metavar="N1",
                       help="construct the saddle-point weight with a leading N1 x N1 block")

    sp = sub.add_parser("check", help="Hermitian-pencil test")
    pencil_inputs(sp)
    sp.add_argument("--tol", type=float, default=1e-10)
    common(sp)

    sp = sub.add_parser("solve-folded", help="eigenvalue nearest a shift by folded iteration")
    pencil_inputs(sp)
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--z0")
    sp.add_argument("--max-iter", type=int, default=200)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--restart-every", type=int)
    sp.add_argument("--out-z")
    common(sp, trace=True)

    sp = sub.add_parser("fold", help="write the folded pencil")
    pencil_inputs(sp)
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--out-M", required=True)
    sp.add_argument("--out-N", required=True)
    sp.add_argument("--format", choices=("array", "coordinate"), default="array")
    common(sp)

    sp = sub.add_parser("sqrt", help="Hermitian pencil whose folding spans {A, B}")
    sp.add_argument("--A", required=True)
    sp.add_argument("--B", required=True)
    sp.add_argument("--out-M")
    sp.add_argument("--out-N")
    sp.add_argument("--out-X")
    sp.add_argument("--format", choices=("array", "coordinate"), default="array")
    common(sp)

    sp = sub.add_parser("plap", help="extreme p-Laplacian eigenvalue, optionally deflated")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--direction", choices=("max", "min"), default="max")
    sp.add_argument("--deflate-after-first", action="store_true")
    sp.add_argument("--starts", type=int, default=8)
    sp.add_argument("--max-iter", type=int, default=2000)
    sp.add_argument("--tol", type=float, default=1e-10)
    common(sp, trace=True)

    sp = sub.add_parser("cs", help="homogeneity, gradient and Cauchy-Schwarz analysis")
    sp.add_argument("--problem", required=True, choices=("rlinear", "linsys", "gp", "plap", "pencil"))
    for name in ("M", "N", "T", "b"):
        sp.add_argument(f"--{name}")
    sp.add_argument("--p", type=float)
    sp.add_argument("--beta", type=float, default=0.0)
    sp.add_argument("--homogenized", action="store_true")
    sp.add_argument("--starts", type=int, default=20)
    sp.add_argument("--max-iter", type=int, default=200)
    common(sp, trace=True)

    sp = sub.add_parser("oracle", help="dense reference solvers")
    sp.add_argument("kind", choices=("eig", "svd", "plap2x2"))
    for name in ("A", "B", "M", "M2"):
        sp.add_argument(f"--{name}")
    sp.add_argument("--p", type=float)
    common(sp)

    sp = sub.add_parser("bench", help="folded iteration versus the dense oracle")
    sp.add_argument("--family", required=True,
                    choices=("random-hermitian-pencil", "fem-saddle", "quadratic-linearized",
                             "identity"))
    sp.add_argument("--sizes", type=_sizes, default=[16])
    sp.add_argument("--instances", type=int, default=2)
    sp.add_argument("--shifts", type=int, default=3)
    sp.add_argument("--max-iter", type=int, default=400)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--csv")
    common(sp)
    return ap


INPUT_FLAGS = ("M", "N", "P", "z0", "A", "B", "matrix", "T", "b", "M2")
OUTPUT_FLAGS = {"out_M": "M", "out_N": "N", "out_X": "X", "out_z": "z", "csv": "csv"}


def config_from_args(ns):
    args = {k: v for k, v in vars(ns).items() if k not in ("replay", "command")}
    inputs = {k: args.pop(k) for k in INPUT_FLAGS if args.get(k) is not None}
    for k in INPUT_FLAGS:
        args.pop(k, None)
    outputs = {v: args.pop(k) for k, v in OUTPUT_FLAGS.items() if args.get(k) is not None}
    for k in OUTPUT_FLAGS:
        args.pop(k, None)
    report = args.pop("report", None)
    trace = args.pop("trace", None)
    params = {k: v for k, v in args.items() if v is not None}
    return RunConfig(ns.command, inputs, params, outputs, report, trace)


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.replay:
        try:
            with open(ns.replay, encoding="utf-8") as fh:
                cfg = RunConfig.from_dict(json.load(fh))
        except (OSError, ValueError, TypeError, KeyError) as exc:
            print(f"quotients: error: cannot load {ns.replay}: {exc}", file=sys.stderr)
            return EXIT_ERROR
    elif ns.command is None:
        parser.print_help(sys.stderr)
        return EXIT_ERROR
    else:
        cfg = config_from_args(ns)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
