"""Command-line front end.

    ahlfors gen --kind momentum --f "cos:1,0" --c 0 --n 2 --shape 32,32 --out K.gfld
    ahlfors theorem3 --K K.gfld --n 2 --shape 32,32
    ahlfors decompose --K K.gfld
    ahlfors verify-identities --metric conformal --amp 0.1 --seed 42 --samples 5
    ahlfors constraints --K K.gfld --lambda 0.5

Reports are JSON documents with keys inputs, parameters, residuals, norms,
solver and verdicts.  Exit status: 0 when every verdict passes, 2 when one
fails, 1 on operational errors.
"""
from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .constraints import constraint_report, corollary1_check, gen_momentum_data, theorem3_check
from .decomposition import certify, decompose, make_synthetic
from .errors import AhlforsError
from .fieldio import read_field, write_field
from .fields import OneFormField, ScalarField, SymTensorField
from .grid import Conformal, Explicit, Flat, GridManifold, build_grid
from .laplacians import verify_identities
from .sampling import random_oneform, random_scalar, random_tt, tt_wave
from .solve import SolveOptions

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class CLIError(Exception):
    pass


# --- report serialization -------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _encode(obj, indent: int) -> str:
    pad = "  " * (indent + 1)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(_encode(v, indent + 1) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_report(report: dict) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(report, 0) + "\n"


def make_report(inputs, parameters, residuals, norms, solver, verdicts, meta=None, **extra) -> dict:
    missing = set(verdicts) - set(residuals)
    if missing:
        raise ValueError(f"verdicts without residuals: {sorted(missing)}")
    report = {
        "inputs": inputs,
        "parameters": parameters,
        "residuals": residuals,
        "norms": norms,
        "solver": solver,
        "verdicts": verdicts,
    }
    report.update(extra)
    if meta is not None:
        report["meta"] = meta
    return report


# --- argument handling ----------------------------------------------------

def parse_mode_spec(spec: str, n: int):
    """Parse ``cos:1,0*0.5+sin:0,2+const:1`` into a function of the coordinates."""
    terms = []
    for raw in spec.split("+"):
        raw = raw.strip()
        if not raw:
            continue
        amp = 1.0
        if "*" in raw:
            raw, amp_s = raw.split("*", 1)
            amp = float(amp_s)
        kind, _, args = raw.partition(":")
        kind = kind.strip()
        if kind == "const":
            terms.append(("const", float(args) * amp, None))
            continue
        if kind not in ("cos", "sin"):
            raise CLIError(f"unknown mode kind {kind!r} in {spec!r}")
        ks = [float(v) for v in args.split(",")] if args else []
        if len(ks) > n:
            raise CLIError(f"mode {raw!r} has more wave numbers than dimensions")
        ks += [0.0] * (n - len(ks))
        terms.append((kind, amp, ks))

    def evaluate(*coords):
        out = np.zeros(coords[0].shape)
        for kind, amp, ks in terms:
            if kind == "const":
                out = out + amp
                continue
            phase = sum(k * x for k, x in zip(ks, coords))
            out = out + amp * (np.cos(phase) if kind == "cos" else np.sin(phase))
        return out

    return evaluate


def _shape(args, fallback=None):
    if args.shape:
        shape = tuple(int(s) for s in args.shape.split(","))
        if len(shape) == 1:
            shape = shape * args.n
        return shape
    if fallback is not None:
        return fallback
    return (32,) * args.n


def _manifold(args, shape=None) -> GridManifold:
    shape = _shape(args, shape)
    n = args.n if args.shape or shape is None else len(shape)
    metric = args.metric
    if metric == "flat":
        spec = Flat()
    elif metric == "conformal":
        amp = args.amp
        spec = Conformal(lambda *c: amp * np.cos(c[0]), amp=amp)
    elif metric.startswith("file:"):
        fld = read_field(metric[5:])
        if isinstance(fld, ScalarField):
            spec = Conformal(fld)
        elif isinstance(fld, SymTensorField):
            spec = Explicit(fld)
        else:
            raise CLIError("metric file must hold a scalar conformal factor or a symmetric tensor")
        shape = fld.shape
        n = fld.n
    else:
        raise CLIError(f"unknown metric {metric!r}")
    return build_grid(n, shape, spec)


def _load(path, cls, m: GridManifold, what: str):
    fld = read_field(path)
    if not isinstance(fld, cls):
        raise CLIError(f"{what} file holds a {type(fld).__name__}, expected {cls.__name__}")
    if fld.shape != m.shape:
        raise CLIError(f"{what} shape {fld.shape} does not match grid {m.shape}")
    return fld


def _solve_opts(args) -> SolveOptions:
    return SolveOptions(tol=args.tol, maxiter=args.maxiter, precondition=args.precondition)


def _K_shape(args):
    if getattr(args, "K", None) and not args.shape:
        return read_field(args.K).shape
    return None


def _meta(args, started):
    if args.no_meta:
        return None
    return {
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "elapsed_s": time.perf_counter() - started,
        "argv": sys.argv[1:],
    }


# --- commands -------------------------------------------------------------

def cmd_gen(args, started):
    m = _manifold(args)
    kind = args.kind
    rng = np.random.default_rng(args.seed)
    info = {}
    if kind == "momentum":
        f = ScalarField.from_values(parse_mode_spec(args.f or "const:0", m.n)(*m.coords))
        phi = tt_wave(m, args.tt_a, args.tt_b) if args.tt_wave else None
        field, H = gen_momentum_data(m, f, args.c, phi)
        info["mean_curvature_range"] = [float(H.values.min()), float(H.values.max())]
    elif kind == "umbilical":
        field = m.metric * args.c if args.c else m.metric
    elif kind == "tt-wave":
        field = tt_wave(m, args.tt_a, args.tt_b)
    elif kind == "synthetic":
        theta = random_oneform(m, rng, args.kmax, zero_mean=True)
        lam = random_scalar(m, rng, args.kmax)
        phi = random_tt(m, rng, args.kmax)
        field = make_synthetic(m, theta, lam, phi)
    elif kind == "zero":
        field = SymTensorField.zeros(m.shape)
    elif kind == "scalar":
        field = ScalarField.from_values(parse_mode_spec(args.f or "const:0", m.n)(*m.coords))
    else:
        raise CLIError(f"unknown kind {kind!r}")
    if not args.out:
        raise CLIError("gen needs --out for the field file")
    write_field(args.out, field)
    report = make_report(
        inputs={"kind": kind, "f": args.f, "out": args.out},
        parameters={"c": args.c, "seed": args.seed, "metric": m.describe()},
        residuals={}, norms={"max_abs": float(np.abs(field.data).max()), **info},
        solver={}, verdicts={}, meta=_meta(args, started),
    )
    return report, None


def cmd_decompose(args, started):
    m = _manifold(args, _K_shape(args))
    K = _load(args.K, SymTensorField, m, "K")
    opts = _solve_opts(args)
    r = decompose(m, K, opts)
    cert = certify(r, m, K)
    if args.save_prefix:
        write_field(args.save_prefix + "theta.gfld", r.theta)
        write_field(args.save_prefix + "lambda.gfld", r.lam)
        write_field(args.save_prefix + "phi_tt.gfld", r.phi_tt)
    residuals = cert.residuals()
    verdicts = cert.verdicts(opts.tol)
    return make_report(
        inputs={"K": args.K, "metric": m.describe()},
        parameters={"tol": opts.tol, "maxiter": opts.max_iterations(m), "precondition": opts.precondition,
                    "thresholds": cert.thresholds(opts.tol)},
        residuals=residuals,
        norms={**cert.norms, "conformal_killing_ratio": cert.conformal_killing_ratio,
               "theta_zero": cert.theta_zero},
        solver={"iterations": r.iterations, "residual": r.residual, "converged": r.converged,
                "deflated_dim": r.deflated_dim},
        verdicts=verdicts, meta=_meta(args, started),
    ), verdicts


def cmd_verify(args, started):
    m = _manifold(args)
    rep = verify_identities(m, seed=args.seed, samples=args.samples, kmax=args.kmax)
    limit = 1e-9 if m.constant_metric else 1e-8
    verdicts = {k: bool(math.isfinite(v) and v <= limit) for k, v in rep.errors.items()}
    return make_report(
        inputs={"metric": m.describe()},
        parameters={"seed": args.seed, "samples": args.samples, "kmax": args.kmax, "threshold": limit},
        residuals=dict(rep.errors), norms={}, solver={},
        verdicts=verdicts, meta=_meta(args, started), worst_node=rep.worst_node,
    ), verdicts


def cmd_constraints(args, started):
    m = _manifold(args, _K_shape(args))
    K = _load(args.K, SymTensorField, m, "K") if args.K else SymTensorField.zeros(m.shape)
    rho = _load(args.rho, ScalarField, m, "rho") if args.rho else None
    J = _load(args.J, OneFormField, m, "J") if args.J else None
    rep = constraint_report(m, K, cosmological=args.cosmological, kappa=args.kappa, rho=rho, J=J)
    residuals = {
        "hamiltonian": rep.hamiltonian_norm,
        "momentum": rep.momentum_norm,
        "hamiltonian_min": float(rep.hamiltonian.values.min()),
        "hamiltonian_max": float(rep.hamiltonian.values.max()),
    }
    verdicts = {
        "hamiltonian": bool(rep.hamiltonian_norm <= args.ctol),
        "momentum": bool(rep.momentum_norm <= args.ctol),
    }
    return make_report(
        inputs={"K": args.K or "zero", "rho": args.rho, "J": args.J, "metric": m.describe()},
        parameters={**rep.parameters, "threshold": args.ctol},
        residuals=residuals, norms={}, solver={},
        verdicts=verdicts, meta=_meta(args, started),
    ), verdicts


def cmd_theorem3(args, started):
    m = _manifold(args, _K_shape(args))
    K = _load(args.K, SymTensorField, m, "K")
    opts = _solve_opts(args)
    rep = theorem3_check(m, K, opts)
    r = rep.decomposition
    n = m.n
    gap = abs(rep.lhs - rep.rhs_derived) / (abs(rep.lhs) + abs(rep.rhs_derived) + 1.0)
    mom_limit = 1e-8 * max(1.0, float(np.sqrt(max(rep.killing_sq, 0.0))))
    residuals = {
        "identity_gap": gap,
        "momentum_residual": rep.momentum_residual_norm,
    }
    verdicts = {"identity_gap": bool(gap <= 1e-6), "momentum_residual": bool(rep.momentum_residual_norm <= mom_limit)}
    if math.isfinite(rep.fitted_c) and abs(rep.lie_integral) > 1e-12:
        residuals["coefficient_error"] = abs(rep.fitted_c - (n - 1) / n)
        verdicts["coefficient_error"] = bool(residuals["coefficient_error"] <= 1e-5)
    corollary = None
    try:
        corollary = corollary1_check(m, K, opts).as_dict()
    except AhlforsError as exc:
        corollary = {"inapplicable": str(exc)}
    return make_report(
        inputs={"K": args.K, "metric": m.describe()},
        parameters={"tol": opts.tol, "coefficient_tolerance": 1e-5, "identity_tolerance": 1e-6},
        residuals=residuals,
        norms={"killing_sq": rep.killing_sq, "div_sq": rep.div_sq, "sd_H": rep.sd_H},
        solver={"iterations": r.iterations, "residual": r.residual, "converged": r.converged,
                "deflated_dim": r.deflated_dim},
        verdicts=verdicts, meta=_meta(args, started),
        theorem3=rep.as_dict(), corollary1=corollary,
    ), verdicts


COMMANDS = {
    "gen": cmd_gen,
    "decompose": cmd_decompose,
    "verify-identities": cmd_verify,
    "constraints": cmd_constraints,
    "theorem3": cmd_theorem3,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--metric", default="flat", help="flat | conformal | file:<path>")
    common.add_argument("--amp", type=float, default=0.1, help="conformal factor u = amp*cos(x)")
    common.add_argument("--n", type=int, default=2, choices=(2, 3))
    common.add_argument("--shape", default=None, help="comma-separated grid sizes, e.g. 32,32")
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--maxiter", type=int, default=None)
    common.add_argument("--precondition", action="store_true", help="Fourier preconditioner for the solver")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--kappa", type=float, default=1.0)
    common.add_argument("--lambda", dest="cosmological", type=float, default=0.0)
    common.add_argument("--out", default=None)
    common.add_argument("--no-meta", action="store_true")

    parser = argparse.ArgumentParser(prog="ahlfors", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="write a test field file")
    p.add_argument("--kind", required=True,
                   choices=("momentum", "umbilical", "tt-wave", "synthetic", "zero", "scalar"))
    p.add_argument("--f", default=None, help='mode spec, e.g. "cos:1,0" or "cos:1,0*0.5+sin:0,2"')
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--tt-wave", action="store_true", help="add the T^3 TT wave to momentum data")
    p.add_argument("--tt-a", type=float, default=1.0)
    p.add_argument("--tt-b", type=float, default=0.5)
    p.add_argument("--kmax", type=int, default=None)

    p = sub.add_parser("decompose", parents=[common], help="split K into S theta + lambda g + phi_TT")
    p.add_argument("--K", required=True)
    p.add_argument("--save-prefix", default=None)

    p = sub.add_parser("verify-identities", parents=[common], help="measure the operator identities")
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--kmax", type=int, default=None)

    p = sub.add_parser("constraints", parents=[common], help="Hamiltonian and momentum residuals")
    p.add_argument("--K", default=None)
    p.add_argument("--rho", default=None)
    p.add_argument("--J", default=None)
    p.add_argument("--ctol", type=float, default=1e-8, help="pass threshold on residual L2 norms")

    p = sub.add_parser("theorem3", parents=[common], help="integral identity and coefficient audit")
    p.add_argument("--K", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        report, verdicts = COMMANDS[args.command](args, started)
    except (AhlforsError, CLIError, OSError, ValueError, TypeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = dumps_report(report)
    if args.out and args.command != "gen":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if verdicts and not all(verdicts.values()):
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
