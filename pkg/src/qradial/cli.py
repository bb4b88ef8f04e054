"""Command-line front end.

Every subcommand prints JSON (default) or CSV to stdout, with floats written to
17 significant digits. Diagnostics go to stderr. Exit codes: 0 success,
1 internal error or a failed verification, 2 invalid input, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import asc, cfun, hyperg, laplacian, qcore, radial, repsim, spectral, verify
from .errors import CapacityError, DivisionByZero, NonConvergent, PoleError, ValidationError
from .qcore import GridFunction, QContext

EXIT_OK, EXIT_INTERNAL, EXIT_VALIDATION, EXIT_NONCONVERGENT = 0, 1, 2, 3
TOL_ENV = "QRADIAL_TOL"
DEFAULT_QUAD_TOL = 1e-13


# ---------------------------------------------------------------- formatting


def fmt_float(x: float) -> str:
    """17 significant digits, always recognizable as a float."""
    x = float(x)
    if not math.isfinite(x):
        return "null"
    s = f"{x:.17g}"
    return s if any(c in s for c in ".eEn") else s + ".0"


def _plain(obj: Any) -> Any:
    """Reduce numpy scalars, arrays and complex numbers to JSON-shaped values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        return float(c.real) if c.imag == 0 else {"re": float(c.real), "im": float(c.imag)}
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def to_json(obj: Any, indent: int = 0) -> str:
    """JSON text with every float at 17 significant digits (the json module prints shortest repr)."""
    obj = _plain(obj)
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{_escape(k)}": {to_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + to_json(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    return '"' + _escape(str(obj)) + '"'


def _escape(s: str) -> str:
    return json.dumps(s)[1:-1]


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    obj = _plain(obj)
    if isinstance(obj, dict):
        out = []
        for k, v in obj.items():
            out += _flatten(v, f"{prefix}.{k}" if prefix else k)
        return out
    if isinstance(obj, list):
        out = []
        for i, v in enumerate(obj):
            out += _flatten(v, f"{prefix}[{i}]")
        return out
    return [(prefix, obj)]


def _csv_cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return "" if v is None else str(v)


@dataclass
class Output:
    """Payload for JSON, with an optional table used for CSV output."""

    payload: dict
    header: list[str] | None = None
    rows: list[list] | None = None
    ok: bool = True

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return to_json(self.payload) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.rows is None:
            w.writerow(["key", "value"])
            for k, v in _flatten(self.payload):
                w.writerow([k, _csv_cell(v)])
        else:
            if self.header:
                w.writerow(self.header)
            for row in self.rows:
                w.writerow([_csv_cell(_plain(v)) for v in row])
        return buf.getvalue()


def _complex_cells(v) -> list:
    v = complex(v)
    return [v.real] if v.imag == 0 else [v.real, v.imag]


def grid_output(f: GridFunction, **extra) -> Output:
    """Grid functions as JSON {k: value}; as CSV the headerless k,re[,im] input format."""
    payload = dict(extra)
    payload["values"] = {str(k): v for k, v in f.values.items()}
    rows = [[k] + _complex_cells(v) for k, v in f.values.items()]
    return Output(payload, None, rows)


# ---------------------------------------------------------------- parsing


def parse_complex(text: str) -> complex | float:
    """ "re" or "re,im"."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return float(parts[0])
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected re[,im], got {text!r}")


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


@dataclass
class RunConfig:
    q: float = 0.5
    n: int = 1
    m: int = 2
    tol: float | None = None
    format: str = "json"
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not (0 < self.q < 1):
            raise ValidationError("q must lie in (0, 1)")
        if self.n < 1 or self.m < 2:
            raise ValidationError("need n >= 1 and m >= 2")
        if self.tol is not None and not self.tol > 0:
            raise ValidationError("tol must be > 0")

    @property
    def ctx(self) -> QContext:
        return QContext(self.q, self.n, self.m)

    def tol_or(self, default: float) -> float:
        return default if self.tol is None else self.tol


def _tol_from_env() -> float | None:
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw == "":
        return None
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(f"{TOL_ENV}={raw!r} is not a number") from None


def _read_grid(args) -> GridFunction:
    if args.input is None:
        raise ValidationError("--in is required")
    if args.input == "-":
        return radial.read_grid_csv(sys.stdin.read())
    path = Path(args.input)
    if not path.is_file():
        raise ValidationError(f"no such file: {path}")
    return radial.read_grid_csv(path)


# ---------------------------------------------------------------- commands


@dataclass(frozen=True)
class Command:
    group: str
    action: str
    handler: Callable
    uses: tuple[Callable, ...]
    configure: Callable[[argparse.ArgumentParser], None]
    help: str


DISPATCH: dict[tuple[str, str], Command] = {}


def command(group: str, action: str, uses: tuple, help: str, configure=lambda p: None):
    def deco(fn):
        DISPATCH[(group, action)] = Command(group, action, fn, uses, configure, help)
        return fn

    return deco


def _opt_in(p):
    p.add_argument("--in", dest="input", help="grid-function CSV (k,re[,im]); '-' for stdin")


@command(
    "qs",
    "eval",
    (qcore.qpochhammer, qcore.qpochhammer_inf, qcore.qgamma, qcore.qpascal_psi, qcore.qintegral_radial, qcore.bminus, qcore.bplus),
    "q-Pochhammer, q-Gamma, q-Pascal entries, Jackson integral and q-derivatives",
    lambda p: (
        p.add_argument("--kind", choices=["poch", "gamma", "psi", "jackson", "bminus", "bplus"], default="poch"),
        p.add_argument("--a", type=parse_complex, help="Pochhammer argument"),
        p.add_argument("--base", type=float, help="base (default q^2)"),
        p.add_argument("--k", type=_nonneg_int, help="length; omitted means infinite (poch), grid index (bminus/bplus), k of psi"),
        p.add_argument("--j", type=_nonneg_int, help="j of psi"),
        p.add_argument("--x", type=float, help="argument of q-Gamma"),
        _opt_in(p),
    ),
)
def cmd_qs_eval(cfg: RunConfig, args) -> Output:
    ctx = cfg.ctx
    base = ctx.q**2 if args.base is None else args.base
    if not 0 < base < 1:
        raise ValidationError("base must lie in (0, 1)")
    kind = args.kind
    if kind == "poch":
        if args.a is None:
            raise ValidationError("--a is required")
        if args.k is None:
            val = qcore.qpochhammer_inf(args.a, base, cfg.tol_or(qcore.DEFAULT_TOL))
        else:
            val = qcore.qpochhammer(args.a, base, args.k)
        return Output({"kind": kind, "a": args.a, "base": base, "k": args.k, "value": val})
    if kind == "gamma":
        if args.x is None:
            raise ValidationError("--x is required")
        return Output({"kind": kind, "x": args.x, "base": base, "value": qcore.qgamma(args.x, base, cfg.tol_or(qcore.DEFAULT_TOL))})
    if kind == "psi":
        if args.j is None or args.k is None:
            raise ValidationError("--j and --k are required")
        return Output({"kind": kind, "j": args.j, "k": args.k, "value": qcore.qpascal_psi(args.j, args.k, ctx)})
    f = _read_grid(args)
    if kind == "jackson":
        return Output({"kind": kind, "value": qcore.qintegral_radial(f, ctx)})
    if args.k is None:
        raise ValidationError("--k is required")
    op = qcore.bminus if kind == "bminus" else qcore.bplus
    return Output({"kind": kind, "k": args.k, "value": op(f.values, args.k, ctx)})


@command(
    "phi",
    "eval",
    (hyperg.phi_l, hyperg.phi_l_grid, hyperg.phi_series),
    "radial eigenfunction Phi_l(q^{-2k})",
    lambda p: (
        p.add_argument("--k", type=_nonneg_int, required=True, help="grid index, or the largest index with --grid"),
        p.add_argument("--l", type=parse_complex, required=True, help="re[,im]; use --l=-1.5,2 for negative values"),
        p.add_argument("--grid", action="store_true", help="tabulate k = 0..K"),
    ),
)
def cmd_phi_eval(cfg: RunConfig, args) -> Output:
    ctx = cfg.ctx
    if args.grid:
        vals = hyperg.phi_l_grid(args.k, args.l, ctx)
        rows = [[k] + _complex_cells(v) for k, v in enumerate(vals)]
        return Output({"l": args.l, "values": list(vals)}, ["k", "re", "im"][: 2 + (vals.dtype.kind == "c")], rows)
    return Output({"k": args.k, "l": args.l, "value": hyperg.phi_l(args.k, args.l, ctx)})


@command(
    "asc",
    "eval",
    (asc.asc_eval_recurrence, asc.asc_eval_hypergeometric, asc.asc_weight),
    "Al-Salam-Chihara polynomial Q_k(z) by both routes",
    lambda p: (
        p.add_argument("--k", type=_nonneg_int, required=True),
        p.add_argument("--z", type=parse_complex, required=True),
    ),
)
def cmd_asc_eval(cfg: RunConfig, args) -> Output:
    params = asc.ASCParams.from_context(cfg.ctx)
    hyp = asc.asc_eval_hypergeometric(args.k, args.z, params)
    if isinstance(args.z, float) and abs(hyp.imag) <= 1e-13 * max(1.0, abs(hyp)):
        hyp = hyp.real
    payload = {"k": args.k, "z": args.z, "hypergeometric": hyp}
    if isinstance(args.z, float):
        payload["recurrence"] = float(asc.asc_eval_recurrence(args.k, args.z, params))
        if -1 < args.z < 1:
            payload["weight"] = float(asc.asc_weight(np.array(args.z), params))
    return Output(payload)


def _measure_payload(measure: asc.SpectralMeasure) -> dict:
    p = measure.params
    return {
        "a": p.a,
        "b": p.b,
        "base": p.base,
        "normalizer": measure.normalizer,
        "mass_points": [{"z": z, "weight": w} for z, w in measure.mass_points],
    }


@command(
    "measure",
    "build",
    (asc.build_spectral_measure,),
    "parameters and point masses of the spectral measure",
    lambda p: p.add_argument("--samples", type=_nonneg_int, default=0, help="also tabulate the density at this many theta intervals"),
)
def cmd_measure_build(cfg: RunConfig, args) -> Output:
    measure = asc.build_spectral_measure(cfg.ctx, cfg.tol_or(qcore.DEFAULT_TOL))
    payload = _measure_payload(measure)
    if args.samples:
        theta, _ = asc.theta_rule(args.samples)
        payload["density_theta"] = {"theta": theta, "density": measure.density_theta(theta)}
    return Output(payload)


@command(
    "measure",
    "quadrature",
    (asc.measure_quadrature, asc.asc_table, asc.asc_mass_table),
    "Gram matrix of orthonormalized P_0..P_jmax under the spectral measure",
    lambda p: p.add_argument("--jmax", type=_nonneg_int, default=12),
)
def cmd_measure_quadrature(cfg: RunConfig, args) -> Output:
    G = verify.gram_matrix(cfg.ctx, args.jmax)
    err = float(np.abs(G - np.eye(G.shape[0])).max())
    rows = [[i, j, G[i, j]] for i in range(G.shape[0]) for j in range(G.shape[1])]
    return Output({"jmax": args.jmax, "max_deviation_from_identity": err, "gram": G}, ["i", "j", "value"], rows)


@command(
    "radial",
    "rho",
    (radial.rho, radial.norm_fj, radial.basis_ej_coeff, radial.measure_weights),
    "density, measure weights, norms of f_j and e_j coefficients",
    lambda p: p.add_argument("--kmax", type=_nonneg_int, default=10),
)
def cmd_radial_rho(cfg: RunConfig, args) -> Output:
    ctx = cfg.ctx
    ks = range(args.kmax + 1)
    weights = radial.measure_weights(args.kmax, ctx)
    table = [[k, radial.rho(k, ctx), weights[k], radial.norm_fj(k, ctx), radial.basis_ej_coeff(k, ctx)] for k in ks]
    header = ["k", "rho", "weight", "norm_fj_sq", "ej_coeff"]
    return Output({"rows": [dict(zip(header, r)) for r in table]}, header, table)


@command(
    "radial",
    "integrate",
    (radial.radial_integral, radial.l2_norm),
    "integral of a grid function against the invariant measure",
    _opt_in,
)
def cmd_radial_integrate(cfg: RunConfig, args) -> Output:
    f = _read_grid(args)
    return Output({"integral": radial.radial_integral(f, cfg.ctx), "l2_norm": radial.l2_norm(f, cfg.ctx)})


@command(
    "box",
    "apply",
    (laplacian.box_pointwise, laplacian.box_divergence, laplacian.dirichlet_form),
    "apply the radial Laplacian to a grid function",
    lambda p: (_opt_in(p), p.add_argument("--route", choices=["pointwise", "divergence"], default="pointwise")),
)
def cmd_box_apply(cfg: RunConfig, args) -> Output:
    f = _read_grid(args)
    op = laplacian.box_pointwise if args.route == "pointwise" else laplacian.box_divergence
    g = op(f, cfg.ctx)
    return grid_output(g, route=args.route, dirichlet_energy=laplacian.dirichlet_form(f, f, cfg.ctx))


@command(
    "box",
    "matrix",
    (laplacian.box_matrix,),
    "tridiagonal matrix of the Laplacian in the orthonormal basis e_j",
    lambda p: p.add_argument("--size", type=int, default=10),
)
def cmd_box_matrix(cfg: RunConfig, args) -> Output:
    if args.size < 1:
        raise ValidationError("size must be >= 1")
    T = laplacian.box_matrix(args.size, cfg.ctx)
    off = list(T.off) + [0.0]
    rows = [[j, T.diag[j], off[j]] for j in range(T.size)]
    return Output({"diag": T.diag, "off": T.off}, ["j", "diag", "off"], rows)


@command(
    "box",
    "spectrum",
    (laplacian.truncated_spectrum, laplacian.lambda_of_z, laplacian.lambda_of_l, laplacian.operator_norm),
    "eigenvalues of the truncated matrix against the continuous band and mass points",
    lambda p: p.add_argument("--size", type=int, default=200),
)
def cmd_box_spectrum(cfg: RunConfig, args) -> Output:
    ctx = cfg.ctx
    ev = laplacian.truncated_spectrum(args.size, ctx)
    band = [float(laplacian.lambda_of_z(-1.0, ctx)), float(laplacian.lambda_of_z(1.0, ctx))]
    measure = asc.build_spectral_measure(ctx)
    mass = [float(laplacian.lambda_of_z(z, ctx)) for z in measure.mass_z]
    payload = {"size": args.size, "norm": float(np.abs(ev).max()), "band": band, "mass_eigenvalues": mass, "eigenvalues": ev}
    return Output(payload, ["index", "eigenvalue"], [[i, v] for i, v in enumerate(ev)])


def _spectral_payload(fhat: spectral.SpectralFunction, samples: int) -> Output:
    z, vals = fhat.samples(samples)
    payload = {
        "qcoeffs": fhat.qcoeffs,
        "samples": {"z": z, "value": vals},
        "mass_values": fhat.mass_values,
    }
    rows = [["cont", zi, v] for zi, v in zip(z, vals)] + [["mass", k, v] for k, v in enumerate(fhat.mass_values)]
    return Output(payload, ["type", "coord", "value"], rows)


@command(
    "transform",
    "forward",
    (spectral.transform_forward,),
    "spectral transform U f, sampled on a theta grid plus the mass points",
    lambda p: (_opt_in(p), p.add_argument("--samples", type=int, default=64)),
)
def cmd_transform_forward(cfg: RunConfig, args) -> Output:
    if args.samples < 1:
        raise ValidationError("samples must be >= 1")
    f = _read_grid(args)
    measure = asc.build_spectral_measure(cfg.ctx)
    return _spectral_payload(spectral.transform_forward(f, measure, cfg.ctx), args.samples)


@command(
    "transform",
    "inverse",
    (spectral.transform_inverse,),
    "inverse transform of a spectral function given by Q_j coefficients (same k,re[,im] format)",
    lambda p: (_opt_in(p), p.add_argument("--jmax", type=_nonneg_int)),
)
def cmd_transform_inverse(cfg: RunConfig, args) -> Output:
    coeffs = _read_grid(args)
    if not coeffs.support:
        raise ValidationError("empty coefficient file")
    measure = asc.build_spectral_measure(cfg.ctx)
    fhat = spectral.SpectralFunction.from_qcoeffs(coeffs.to_array(), measure)
    jmax = coeffs.kmax if args.jmax is None else args.jmax
    f = spectral.transform_inverse(fhat, cfg.ctx, jmax, cfg.tol_or(DEFAULT_QUAD_TOL))
    return grid_output(f)


@command(
    "transform",
    "plancherel",
    (spectral.plancherel_check,),
    "radial L2 norm squared against the spectral L2 norm squared",
    _opt_in,
)
def cmd_transform_plancherel(cfg: RunConfig, args) -> Output:
    f = _read_grid(args)
    measure = asc.build_spectral_measure(cfg.ctx)
    lhs, rhs = spectral.plancherel_check(f, measure, cfg.ctx, cfg.tol_or(DEFAULT_QUAD_TOL))
    rel = abs(lhs - rhs) / lhs if lhs else abs(rhs)
    return Output({"radial_norm_sq": lhs, "spectral_norm_sq": rhs, "relative_difference": rel})


@command(
    "transform",
    "multcheck",
    (spectral.multiplication_equivalence_check,),
    "distance between U(box f) and lambda U f",
    _opt_in,
)
def cmd_transform_multcheck(cfg: RunConfig, args) -> Output:
    f = _read_grid(args)
    measure = asc.build_spectral_measure(cfg.ctx)
    dist = spectral.multiplication_equivalence_check(f, measure, cfg.ctx, cfg.tol_or(DEFAULT_QUAD_TOL))
    norm = radial.l2_norm(f, cfg.ctx)
    return Output({"distance": dist, "relative_distance": dist / norm if norm else dist})


@command(
    "cfun",
    "eval",
    (cfun.c_function,),
    "Harish-Chandra c-function c(l)",
    lambda p: p.add_argument("--l", type=parse_complex, required=True),
)
def cmd_cfun_eval(cfg: RunConfig, args) -> Output:
    return Output({"l": args.l, "value": cfun.c_function(args.l, cfg.ctx, cfg.tol_or(qcore.DEFAULT_TOL))})


@command(
    "cfun",
    "asymptotics",
    (cfun.asymptotics_check,),
    "Phi_l(x) / x^s at x = q^{-2 kmax} against the c-function",
    lambda p: (
        p.add_argument("--l", type=parse_complex, required=True),
        p.add_argument("--kmax", type=_nonneg_int, default=40),
    ),
)
def cmd_cfun_asymptotics(cfg: RunConfig, args) -> Output:
    ratio, target = cfun.asymptotics_check(args.l, args.kmax, cfg.ctx)
    return Output({"l": args.l, "kmax": args.kmax, "ratio": ratio, "target": target, "difference": abs(ratio - target)})


@command(
    "cfun",
    "wc",
    (cfun.wc_identity_check,),
    "Plancherel weight against 1 / (c(l) c(-l-N+1) (q^{2n}; q^2)^2)",
    lambda p: p.add_argument("--z", type=float, required=True),
)
def cmd_cfun_wc(cfg: RunConfig, args) -> Output:
    lhs, rhs = cfun.wc_identity_check(args.z, cfg.ctx, cfg.tol_or(qcore.DEFAULT_TOL))
    return Output({"z": args.z, "weight": lhs, "c_product": rhs, "relative_difference": abs(lhs - rhs) / abs(lhs)})


def _opt_M(p, default=10):
    p.add_argument("--M", type=_nonneg_int, default=default, help="truncation window size")
    p.add_argument("--capacity", type=int, default=repsim.DEFAULT_CAPACITY)


def _rep(cfg: RunConfig, args) -> repsim.TruncatedRep:
    if args.M < 1:
        raise ValidationError("M must be >= 1")
    return repsim.build_rep(args.M, cfg.ctx, args.capacity)


@command("rep", "build", (repsim.build_rep,), "size of the truncated representation", _opt_M)
def cmd_rep_build(cfg: RunConfig, args) -> Output:
    rep = _rep(cfg, args)
    nnz = sum(int(t.nnz) for t in rep.T + rep.Tstar)
    return Output({"M": rep.M, "size": rep.size, "interior": int(rep.interior.sum()), "generators": len(rep.T), "nnz": nnz})


@command("rep", "relations", (repsim.check_relations,), "relative residual of every defining relation", _opt_M)
def cmd_rep_relations(cfg: RunConfig, args) -> Output:
    res = repsim.check_relations(_rep(cfg, args))
    return Output(res, ["relation", "residual"], [[k, v] for k, v in res.items()])


@command(
    "rep",
    "integral",
    (repsim.trace_integral, repsim.trace_tail_bound, repsim.radial_equivalence_check),
    "truncated trace integral against the radial integral",
    lambda p: (_opt_in(p), _opt_M(p, 30)),
)
def cmd_rep_integral(cfg: RunConfig, args) -> Output:
    f = _read_grid(args)
    r = repsim.radial_equivalence_check(f, _rep(cfg, args))
    return Output({"trace": r.trace, "radial": r.radial, "tailbound": r.tailbound, "within_bound": r.passed})


@command(
    "verify",
    "all",
    (verify.run_all,),
    "run the acceptance battery; --q/--n/--m restrict it to one configuration",
    lambda p: p.add_argument("--only", type=int, nargs="+", help="criterion numbers"),
)
def cmd_verify_all(cfg: RunConfig, args) -> Output:
    explicit = cfg.extra.get("explicit", set())
    if explicit:
        battery = verify.single_config_battery(cfg.q, cfg.n, cfg.m, cfg.seed)
    else:
        battery = verify.Battery(seed=cfg.seed)
    results = verify.run_all(battery, args.only)
    for r in results:
        print(r.line(), file=sys.stderr)
    header = ["criterion", "name", "passed", "metric", "threshold", "seconds", "budget"]
    rows = [[r.number, r.name, r.passed, r.metric, r.threshold, r.seconds, r.budget] for r in results]
    payload = {
        "passed": all(r.passed for r in results),
        "results": [dict(zip(header, row), detail=r.detail) for row, r in zip(rows, results)],
    }
    return Output(payload, header, rows, ok=payload["passed"])


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=float, default=argparse.SUPPRESS, help="deformation parameter in (0,1) (default 0.5)")
    common.add_argument("--n", type=int, default=argparse.SUPPRESS, help="default 1")
    common.add_argument("--m", type=int, default=argparse.SUPPRESS, help="default 2")
    common.add_argument("--tol", type=float, default=None, help=f"tolerance override (also {TOL_ENV})")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="qradial", description="Radial harmonic analysis on quantum H_{n,m}.")
    groups = parser.add_subparsers(dest="group", required=True)
    subs: dict[str, Any] = {}
    for (group, action), cmd in DISPATCH.items():
        if group not in subs:
            subs[group] = groups.add_parser(group).add_subparsers(dest="action", required=True)
        p = subs[group].add_parser(action, parents=[common], help=cmd.help, description=cmd.help)
        cmd.configure(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_VALIDATION
    explicit = {k for k in ("q", "n", "m") if hasattr(args, k)}
    try:
        tol = args.tol if args.tol is not None else _tol_from_env()
        cfg = RunConfig(
            q=getattr(args, "q", 0.5),
            n=getattr(args, "n", 1),
            m=getattr(args, "m", 2),
            tol=tol,
            format=args.format,
            seed=args.seed,
            extra={"explicit": explicit},
        )
        cfg.validate()
        out = DISPATCH[(args.group, args.action)].handler(cfg, args)
    except (ValidationError, PoleError, DivisionByZero, CapacityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NonConvergent as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(out.render(cfg.format))
    return EXIT_OK if out.ok else EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
