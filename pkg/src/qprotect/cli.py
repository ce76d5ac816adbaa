"""Command-line front end.

Subcommands: fidelity (single-point closed form vs matrix pipeline),
optimize (best control angles for one state pair), sweep (optimizer
surface over the state space), curve (surface maximum against noise
level), snapshot (stage-by-stage Bloch table), figure (reference figure
datasets) and verify (invariant suite).

Angles are radians unless --degrees is given; the noise probability p is
never converted.  Outputs are CSV or JSON, written atomically, with the
effective configuration echoed as metadata.  Exit codes: 0 success, 1 a
verify invariant failed, 2 usage or parse error, 3 range or input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

from .channel import ControlParams, pipeline_trace
from .fidelity import fidelity_closed, fidelity_simulated
from .figures import FIGURE_IDS, figure_dataset
from .optimize import (
    OptimizationConfig,
    curve_over_p,
    optimize_point,
    sweep_surface,
)
from .output import render_csv, render_json, write_text
from .verify import run_checks

__all__ = ["RunConfig", "main"]

_HALF_PI = math.pi / 2
_DEG = math.pi / 180.0

_ANGLE_NAMES = ("theta", "phi", "chi", "eta", "beta")
_RESULT_FIELDS = (
    "chi_opt",
    "eta_opt",
    "beta_opt",
    "f_opt",
    "f_opt_beta0",
    "delta_f",
    "f_dn",
    "f_h",
    "f_imp",
    "degenerate",
)

# config-file keys and their coercions; everything else is a flag only
_CONFIG_COERCE = {
    "format": str,
    "jobs": int,
    "grid_theta": int,
    "grid_phi": int,
    "p_steps": int,
    "chi_grid": int,
    "beta_grid": int,
    "refine_tol": float,
    "max_refine_iters": int,
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Effective settings of one invocation after flags/config-file/defaults merge.

    ``command`` is one of fidelity, optimize, sweep, curve, snapshot,
    figure, verify.  Parameter fields are radians (any --degrees
    conversion has already happened).  Deliberately seed-free: nothing
    downstream draws random numbers, so equal configs give equal output
    bytes regardless of --jobs.
    """

    command: str
    theta: float | None = None
    phi: float | None = None
    p: float | None = None
    chi: float | None = None
    eta: float | None = None
    beta: float | None = None
    quantity: str | None = None
    figure: int | None = None
    grid_theta: int = 64
    grid_phi: int = 64
    p_steps: int = 101
    out: str | None = None
    format: str = "csv"
    format_explicit: bool = False
    jobs: int = 1


def _add_param_flags(sub, names: tuple[str, ...], *, required: bool) -> None:
    for name in names:
        sub.add_argument(f"--{name}", type=float, required=required, metavar="X")


def _add_io_flags(sub, *, degrees: bool, jobs: bool) -> None:
    sub.add_argument("--out", metavar="PATH", help="write output to this file atomically")
    sub.add_argument("--format", choices=("csv", "json"), help="columnar output format")
    sub.add_argument("--config", metavar="PATH", help="JSON file with run settings")
    if degrees:
        sub.add_argument(
            "--degrees", action="store_true", help="interpret angle flags as degrees"
        )
    if jobs:
        sub.add_argument("--jobs", type=int, metavar="N", help="parallel workers")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qprotect",
        description="Weak-measurement feedback protection of nonorthogonal qubit pairs.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("fidelity", help="closed-form and simulated fidelity at one point")
    _add_param_flags(sub, ("theta", "phi", "p", "chi", "eta", "beta"), required=True)
    _add_io_flags(sub, degrees=True, jobs=False)

    sub = subs.add_parser("optimize", help="best control angles for one state pair")
    _add_param_flags(sub, ("theta", "phi", "p"), required=True)
    _add_io_flags(sub, degrees=True, jobs=False)

    sub = subs.add_parser("sweep", help="optimizer surface over the state space")
    sub.add_argument(
        "quantity",
        nargs="?",
        default="delta_f",
        choices=("delta_f", "beta_opt", "f_imp"),
        help="surface to report (full results are emitted either way)",
    )
    _add_param_flags(sub, ("p",), required=True)
    sub.add_argument("--grid-theta", type=int, metavar="N")
    sub.add_argument("--grid-phi", type=int, metavar="N")
    _add_io_flags(sub, degrees=False, jobs=True)

    sub = subs.add_parser("curve", help="surface maximum traced against noise level")
    sub.add_argument("quantity", nargs="?", default="delta_f", choices=("delta_f", "f_imp"))
    sub.add_argument("--p-steps", type=int, metavar="N")
    sub.add_argument("--grid-theta", type=int, metavar="N")
    sub.add_argument("--grid-phi", type=int, metavar="N")
    _add_io_flags(sub, degrees=False, jobs=True)

    sub = subs.add_parser("snapshot", help="stage-by-stage Bloch table for one run")
    _add_param_flags(sub, ("theta", "phi", "p", "chi", "eta", "beta"), required=True)
    _add_io_flags(sub, degrees=True, jobs=False)

    sub = subs.add_parser("figure", help="dataset behind one reference figure")
    sub.add_argument("--figure", type=int, choices=FIGURE_IDS, required=True)
    sub.add_argument("--grid-theta", type=int, metavar="N")
    sub.add_argument("--grid-phi", type=int, metavar="N")
    sub.add_argument("--p-steps", type=int, metavar="N")
    _add_io_flags(sub, degrees=False, jobs=True)

    sub = subs.add_parser("verify", help="run the invariant suite")
    _add_io_flags(sub, degrees=False, jobs=False)

    return parser


def _load_config_file(path: str) -> dict:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    out = {}
    for key, value in data.items():
        if key not in _CONFIG_COERCE:
            raise ValueError(f"unknown config key {key!r}")
        try:
            out[key] = _CONFIG_COERCE[key](value)
        except (TypeError, ValueError):
            raise ValueError(f"config key {key!r} has invalid value {value!r}")
    if "format" in out and out["format"] not in ("csv", "json"):
        raise ValueError(f"config format must be csv or json, got {out['format']!r}")
    return out


def _merge(args: argparse.Namespace) -> tuple[RunConfig, OptimizationConfig]:
    file_cfg = _load_config_file(args.config) if getattr(args, "config", None) else {}

    def pick(name, default):
        value = getattr(args, name, None)
        if value is not None:
            return value
        return file_cfg.get(name, default)

    values = {}
    for name in ("theta", "phi", "p", "chi", "eta", "beta"):
        values[name] = getattr(args, name, None)
    if getattr(args, "degrees", False):
        for name in _ANGLE_NAMES:
            if values[name] is not None:
                values[name] = values[name] * _DEG

    jobs = int(pick("jobs", 1))
    if jobs < 1:
        raise ValueError(f"jobs must be at least 1, got {jobs}")

    fmt = pick("format", None)
    run = RunConfig(
        command=args.command,
        theta=values["theta"],
        phi=values["phi"],
        p=values["p"],
        chi=values["chi"],
        eta=values["eta"],
        beta=values["beta"],
        quantity=getattr(args, "quantity", None),
        figure=getattr(args, "figure", None),
        grid_theta=int(pick("grid_theta", 64)),
        grid_phi=int(pick("grid_phi", 64)),
        p_steps=int(pick("p_steps", 101)),
        out=getattr(args, "out", None),
        format=fmt if fmt is not None else "csv",
        format_explicit=fmt is not None,
        jobs=jobs,
    )

    base = OptimizationConfig()
    opt_cfg = OptimizationConfig(
        chi_grid=int(file_cfg.get("chi_grid", base.chi_grid)),
        beta_grid=int(file_cfg.get("beta_grid", base.beta_grid)),
        refine_tol=float(file_cfg.get("refine_tol", base.refine_tol)),
        max_refine_iters=int(file_cfg.get("max_refine_iters", base.max_refine_iters)),
    )
    return run, opt_cfg


def _opt_metadata(cfg: OptimizationConfig) -> dict:
    return {
        "chi_grid": cfg.chi_grid,
        "beta_grid": cfg.beta_grid,
        "refine_tol": cfg.refine_tol,
        "max_refine_iters": cfg.max_refine_iters,
    }


def _emit(run: RunConfig, metadata: dict, columns, rows, text_lines=None) -> None:
    """Write one dataset per the run's output settings.

    File or explicit --format requests get the columnar form; otherwise
    commands with a human-readable report print that to stdout.  Content
    never depends on --out, --jobs or the output format chosen.
    """
    meta = {"command": run.command}
    meta.update(metadata)
    if run.out is not None or run.format_explicit or text_lines is None:
        render = render_csv if run.format == "csv" else render_json
        content = render(meta, list(columns), list(rows))
        if run.out is not None:
            write_text(run.out, content)
        else:
            sys.stdout.write(content)
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")


def _point_params(run: RunConfig) -> ControlParams:
    return ControlParams(
        theta=run.theta, phi=run.phi, p=run.p, chi=run.chi, eta=run.eta, beta=run.beta
    )


def _params_metadata(params: ControlParams) -> dict:
    return {
        "theta": params.theta,
        "phi": params.phi,
        "p": params.p,
        "chi": params.chi,
        "eta": params.eta,
        "beta": params.beta,
    }


def _cmd_fidelity(run: RunConfig, opt_cfg: OptimizationConfig) -> int:
    params = _point_params(run)
    closed = fidelity_closed(params)
    sim = fidelity_simulated(params)
    difference = closed - sim.f_avg
    columns = ["f_closed", "f_simulated", "difference", "f_plus", "f_minus"]
    row = (closed, sim.f_avg, difference, sim.f_plus, sim.f_minus)
    text = ["%s: %.12f" % (name, value) for name, value in zip(columns, row)]
    _emit(run, _params_metadata(params), columns, [row], text)
    return 0


def _cmd_optimize(run: RunConfig, opt_cfg: OptimizationConfig) -> int:
    result = optimize_point(run.theta, run.phi, run.p, opt_cfg)
    metadata = {"theta": run.theta, "phi": run.phi, "p": run.p}
    metadata.update(_opt_metadata(opt_cfg))
    row = tuple(getattr(result, name) for name in _RESULT_FIELDS)
    text = []
    for name, value in zip(_RESULT_FIELDS, row):
        text.append(
            "%s: %s" % (name, ("true" if value else "false") if name == "degenerate" else "%.12f" % value)
        )
    _emit(run, metadata, list(_RESULT_FIELDS), [row], text)
    return 0


def _cmd_sweep(run: RunConfig, opt_cfg: OptimizationConfig) -> int:
    records = sweep_surface(
        run.p,
        (0.0, _HALF_PI),
        (0.0, _HALF_PI),
        (run.grid_theta, run.grid_phi),
        quantity=run.quantity,
        config=opt_cfg,
        jobs=run.jobs,
    )
    columns = ["theta", "phi", "p"] + list(_RESULT_FIELDS)
    rows = [
        (rec.theta, rec.phi, rec.p) + tuple(getattr(rec.result, n) for n in _RESULT_FIELDS)
        for rec in records
    ]
    metadata = {
        "quantity": run.quantity,
        "p": run.p,
        "grid_theta": run.grid_theta,
        "grid_phi": run.grid_phi,
        "theta_min": 0.0,
        "theta_max": _HALF_PI,
        "phi_min": 0.0,
        "phi_max": _HALF_PI,
    }
    metadata.update(_opt_metadata(opt_cfg))
    _emit(run, metadata, columns, rows)
    return 0


def _cmd_curve(run: RunConfig, opt_cfg: OptimizationConfig) -> int:
    points = curve_over_p(
        (0.0, 0.5),
        run.p_steps,
        run.quantity,
        opt_cfg,
        grid_counts=(run.grid_theta, run.grid_phi),
        jobs=run.jobs,
    )
    columns = ["p", run.quantity, "theta_argmax", "phi_argmax"]
    metadata = {
        "quantity": run.quantity,
        "p_min": 0.0,
        "p_max": 0.5,
        "p_steps": run.p_steps,
        "grid_theta": run.grid_theta,
        "grid_phi": run.grid_phi,
    }
    metadata.update(_opt_metadata(opt_cfg))
    _emit(run, metadata, columns, points)
    return 0


def _cmd_snapshot(run: RunConfig, opt_cfg: OptimizationConfig) -> int:
    params = _point_params(run)
    trace = pipeline_trace(params)
    columns = ["stage", "weight", "x", "y", "z"]
    rows = []
    text = []
    for field in dataclasses.fields(trace):
        bloch = getattr(trace, field.name)
        rows.append((field.name, bloch.weight, bloch.x, bloch.y, bloch.z))
        text.append(
            "%s: weight=%.12f x=%.12f y=%.12f z=%.12f"
            % (field.name, bloch.weight, bloch.x, bloch.y, bloch.z)
        )
    _emit(run, _params_metadata(params), columns, rows, text)
    return 0


def _cmd_figure(run: RunConfig, opt_cfg: OptimizationConfig) -> int:
    metadata, columns, rows = figure_dataset(
        run.figure,
        grid_counts=(run.grid_theta, run.grid_phi),
        p_steps=run.p_steps,
        config=opt_cfg,
        jobs=run.jobs,
    )
    _emit(run, metadata, columns, rows)
    return 0


def _cmd_verify(run: RunConfig, opt_cfg: OptimizationConfig) -> int:
    results = run_checks()
    columns = ["check", "deviation", "tolerance", "passed", "samples"]
    rows = [(r.name, r.deviation, r.tolerance, r.passed, r.samples) for r in results]
    for r in results:
        print(
            "%s %-24s max_dev=%.3e tol=%.0e samples=%d"
            % ("PASS" if r.passed else "FAIL", r.name, r.deviation, r.tolerance, r.samples)
        )
    failed = [r for r in results if not r.passed]
    print("verify: %d/%d checks passed" % (len(results) - len(failed), len(results)))
    if run.out is not None or run.format_explicit:
        _emit(run, {"checks": len(results)}, columns, rows)
    return 1 if failed else 0


_DISPATCH = {
    "fidelity": _cmd_fidelity,
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
    "curve": _cmd_curve,
    "snapshot": _cmd_snapshot,
    "figure": _cmd_figure,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    """Entry point; returns the process exit code.

    argparse handles usage errors itself (SystemExit with code 2); range
    and input errors surface as ValueError and map to exit code 3.
    """
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        run, opt_cfg = _merge(args)
        return _DISPATCH[run.command](run, opt_cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
