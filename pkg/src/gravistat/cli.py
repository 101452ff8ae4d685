"""Command line interface.

Subcommands: fermi, solve, trace, turning-points, count, energy,
validate, diagram.  Every flag may also be supplied through a TOML
config file (--config); explicit command line flags win over file
values, which win over built-in defaults.  Outputs are deterministic:
re-running a command with the same configuration reproduces its files
byte for byte.  The environment variable GRAVISTAT_THREADS caps the
number of worker processes used by sweeps.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import branch as branch_mod
from . import diagrams, serialize, validation
from .energetics import free_energy
from .fermi import (DEFAULT_CONFIG, FermiAccuracyError, FermiDomainError,
                    fermi_derivative, fermi_eval, fermi_inverse_half)
from .models import make_model
from .shooting import (IntegrationError, IntegratorConfig, integrate,
                       reconstruct_profile)

_MODEL_DEFAULTS = {"model": None, "eta": 0.0}
_INTEGRATOR_DEFAULTS = {"eps": 1e-6, "abs_tol": 1e-10, "rel_tol": 1e-10,
                        "max_steps": 2_000_000, "dense_samples": 2000}
_SWEEP_DEFAULTS = {"rho0_min": 1e-3, "rho0_max": 1e8, "points": 2000}


class CliError(Exception):
    """Configuration problem; exits with status 2."""


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=("mb", "sfd", "fd"), default=argparse.SUPPRESS,
                   help="statistics model (default: required)")
    p.add_argument("--eta", type=float, default=argparse.SUPPRESS,
                   help="quantum parameter (default 0)")


def _add_integrator_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", type=float, default=argparse.SUPPRESS,
                   help="truncation level for the starting data (default 1e-6)")
    p.add_argument("--abs-tol", type=float, default=argparse.SUPPRESS)
    p.add_argument("--rel-tol", type=float, default=argparse.SUPPRESS)
    p.add_argument("--max-steps", type=int, default=argparse.SUPPRESS)
    p.add_argument("--dense-samples", type=int, default=argparse.SUPPRESS)


def _add_sweep_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rho0-min", type=float, default=argparse.SUPPRESS)
    p.add_argument("--rho0-max", type=float, default=argparse.SUPPRESS)
    p.add_argument("--points", type=int, default=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gravistat",
                                     description="radial gravitating-gas equilibria")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fermi", help="evaluate a Fermi integral")
    p.add_argument("--order", type=float, required=True)
    p.add_argument("--z", type=float, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--inverse", action="store_true",
                       help="treat --z as the value to invert (order 0.5 only)")
    group.add_argument("--derivative", action="store_true")

    p = sub.add_parser("solve", help="one equilibrium at a given rho0")
    _add_model_args(p)
    _add_integrator_args(p)
    p.add_argument("--rho0", type=float, required=True)
    p.add_argument("--out", type=Path, default=argparse.SUPPRESS)
    p.add_argument("--profile-out", type=Path, default=argparse.SUPPRESS,
                   help="also write an r,rho,phi CSV profile")
    p.add_argument("--profile-points", type=int, default=argparse.SUPPRESS)

    p = sub.add_parser("trace", help="sweep a rho0 range into a branch file")
    _add_model_args(p)
    _add_integrator_args(p)
    _add_sweep_args(p)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)

    p = sub.add_parser("turning-points", help="extrema of M along a branch")
    _add_model_args(p)
    _add_integrator_args(p)
    _add_sweep_args(p)
    p.add_argument("--out", type=Path, default=argparse.SUPPRESS)

    p = sub.add_parser("count", help="count solutions with a prescribed mass")
    _add_model_args(p)
    _add_integrator_args(p)
    _add_sweep_args(p)
    p.add_argument("--mass", type=float, required=True)
    p.add_argument("--out", type=Path, default=argparse.SUPPRESS)

    p = sub.add_parser("energy", help="entropy / potential / free energy at rho0")
    _add_model_args(p)
    _add_integrator_args(p)
    p.add_argument("--rho0", type=float, required=True)
    p.add_argument("--doubled-potential", action="store_true",
                   help="use the 4*pi potential normalization instead of 2*pi")
    p.add_argument("--out", type=Path, default=argparse.SUPPRESS)

    p = sub.add_parser("validate", help="run the standard check matrix")
    _add_integrator_args(p)
    p.add_argument("--kinds", default=argparse.SUPPRESS,
                   help="comma list of model kinds to include")
    p.add_argument("--rho0-list", default=argparse.SUPPRESS,
                   help="comma list of rho0 values to include")
    p.add_argument("--out", type=Path, default=argparse.SUPPRESS)

    p = sub.add_parser("diagram", help="render branches as SVG")
    p.add_argument("--from", dest="from_files", type=Path, nargs="+",
                   default=argparse.SUPPRESS, help="branch CSV/JSON files")
    _add_model_args(p)
    _add_integrator_args(p)
    _add_sweep_args(p)
    p.add_argument("--etas", default=argparse.SUPPRESS,
                   help="comma list of eta values to trace and draw")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--quantity", choices=diagrams.QUANTITIES,
                   default=argparse.SUPPRESS)
    p.add_argument("--log100-ordinate", action="store_true")
    p.add_argument("--linear-axes", action="store_true",
                   help="disable the log(1+.) presentation axes")
    p.add_argument("--title", default=argparse.SUPPRESS)

    for sp in sub.choices.values():
        sp.add_argument("--config", type=Path, default=argparse.SUPPRESS,
                        help="TOML file supplying any of the above flags")
    return parser


def _merge_options(args: argparse.Namespace, defaults: dict) -> dict:
    given = vars(args).copy()
    given.pop("command", None)
    config_path = given.pop("config", None)
    merged = dict(defaults)
    if config_path is not None:
        try:
            with open(config_path, "rb") as fh:
                file_values = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise CliError(f"cannot read config {config_path}: {exc}")
        for key, value in file_values.items():
            key = key.replace("-", "_")
            if key not in merged:
                raise CliError(f"unknown config key {key!r} in {config_path}")
            merged[key] = value
    merged.update(given)
    return merged


def _integrator_config(opts: dict) -> IntegratorConfig:
    try:
        return IntegratorConfig(eps_cut=float(opts["eps"]),
                                abs_tol=float(opts["abs_tol"]),
                                rel_tol=float(opts["rel_tol"]),
                                max_steps=int(opts["max_steps"]),
                                dense_samples=int(opts["dense_samples"]))
    except ValueError as exc:
        raise CliError(str(exc))


def _model(opts: dict):
    if opts.get("model") is None:
        raise CliError("--model is required")
    try:
        return make_model(opts["model"], float(opts.get("eta", 0.0)))
    except ValueError as exc:
        raise CliError(str(exc))


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _cmd_fermi(args) -> int:
    opts = _merge_options(args, {"order": None, "z": None,
                                 "inverse": False, "derivative": False})
    try:
        if opts["inverse"]:
            if opts["order"] != 0.5:
                raise CliError("--inverse supports order 0.5 only")
            value = fermi_inverse_half(opts["z"], DEFAULT_CONFIG)
        elif opts["derivative"]:
            value = fermi_derivative(opts["order"], opts["z"], DEFAULT_CONFIG)
        else:
            value = fermi_eval(opts["order"], opts["z"], DEFAULT_CONFIG)
    except (FermiDomainError, FermiAccuracyError) as exc:
        raise CliError(str(exc))
    print(format(value, ".9g"))
    return 0


def _cmd_solve(args) -> int:
    opts = _merge_options(args, {**_MODEL_DEFAULTS, **_INTEGRATOR_DEFAULTS,
                                 "rho0": None, "out": None, "profile_out": None,
                                 "profile_points": 200})
    model = _model(opts)
    cfg = _integrator_config(opts)
    traj = integrate(model, float(opts["rho0"]), cfg)
    profile = reconstruct_profile(traj)
    report = free_energy(model, traj)
    doc = {"model": serialize.model_to_dict(model),
           "rho0": profile.sup_density, "mass": profile.mass, "m": profile.m,
           "sup_density": profile.sup_density, "lambda": profile.multiplier,
           "boundary_density": profile.boundary_density,
           "entropy": report.entropy, "potential": report.potential,
           "free_energy": report.free_energy}
    _write(opts["out"], serialize.dumps(doc) + "\n")
    if opts["profile_out"] is not None:
        n = int(opts["profile_points"])
        r = np.exp(np.linspace(traj.t_start, 0.0, n))
        rho = np.atleast_1d(profile.rho(r))
        phi = np.atleast_1d(profile.phi(r))
        lines = ["r,rho,phi"]
        lines += [",".join(serialize.fmt_number(float(v)) for v in row)
                  for row in zip(r, rho, phi)]
        _write(opts["profile_out"], "\r\n".join(lines) + "\r\n")
    return 0


def _trace(opts: dict):
    model = _model(opts)
    cfg = _integrator_config(opts)
    return branch_mod.trace_branch(model, float(opts["rho0_min"]),
                                   float(opts["rho0_max"]), int(opts["points"]),
                                   cfg), cfg


def _cmd_trace(args) -> int:
    opts = _merge_options(args, {**_MODEL_DEFAULTS, **_INTEGRATOR_DEFAULTS,
                                 **_SWEEP_DEFAULTS, "out": None, "format": None})
    branch, _ = _trace(opts)
    fmt = opts["format"]
    if fmt is None:
        fmt = "json" if str(opts["out"]).endswith(".json") else "csv"
    text = (serialize.branch_to_json(branch) if fmt == "json"
            else serialize.branch_to_csv(branch))
    _write(opts["out"], text)
    if branch.failures:
        failing = ", ".join(f"{f.rho0:g}" for f in branch.failures)
        print(f"warning: {len(branch.failures)} sweep points failed "
              f"(rho0: {failing})", file=sys.stderr)
    return 0


def _cmd_turning_points(args) -> int:
    opts = _merge_options(args, {**_MODEL_DEFAULTS, **_INTEGRATOR_DEFAULTS,
                                 **_SWEEP_DEFAULTS, "out": None})
    branch, cfg = _trace(opts)
    tps = branch_mod.detect_turning_points(branch, cfg)
    _write(opts["out"], serialize.turning_points_to_json(tps, branch.model))
    return 0


def _cmd_count(args) -> int:
    opts = _merge_options(args, {**_MODEL_DEFAULTS, **_INTEGRATOR_DEFAULTS,
                                 **_SWEEP_DEFAULTS, "mass": None, "out": None})
    if not (opts["mass"] and opts["mass"] > 0.0):
        raise CliError("--mass must be positive")
    branch, cfg = _trace(opts)
    result = branch_mod.count_solutions(branch, float(opts["mass"]), cfg)
    suffix = " (lower bound: unresolved brackets remain)" if result.lower_bound_only else ""
    print(f"count: {result.count}{suffix}")
    print("roots:" + "".join(f" {r:.9g}" for r in result.roots))
    if opts["out"] is not None:
        _write(opts["out"], serialize.count_to_json(result, float(opts["mass"]),
                                                    branch.model))
    return 0


def _cmd_energy(args) -> int:
    opts = _merge_options(args, {**_MODEL_DEFAULTS, **_INTEGRATOR_DEFAULTS,
                                 "rho0": None, "doubled_potential": False,
                                 "out": None})
    model = _model(opts)
    cfg = _integrator_config(opts)
    traj = integrate(model, float(opts["rho0"]), cfg)
    report = free_energy(model, traj, doubled_potential=bool(opts["doubled_potential"]))
    doc = {"model": serialize.model_to_dict(model), "rho0": float(opts["rho0"]),
           "entropy": report.entropy, "potential": report.potential,
           "free_energy": report.free_energy,
           "doubled_potential": bool(opts["doubled_potential"])}
    _write(opts["out"], serialize.dumps(doc) + "\n")
    return 0


def _cmd_validate(args) -> int:
    opts = _merge_options(args, {**_INTEGRATOR_DEFAULTS, "kinds": None,
                                 "rho0_list": None, "out": None})
    cfg = _integrator_config(opts)
    kinds = tuple(opts["kinds"].split(",")) if opts["kinds"] else None
    rho0s = (tuple(float(v) for v in str(opts["rho0_list"]).split(","))
             if opts["rho0_list"] else None)
    records = validation.run_standard_checks(cfg, kinds=kinds, rho0_values=rho0s)
    _write(opts["out"], serialize.validation_records_to_json(records))
    n_failed = sum(1 for rec in records for r in rec["checks"] if not r.passed)
    if n_failed:
        print(f"{n_failed} checks failed", file=sys.stderr)
        return 1
    return 0


def _cmd_diagram(args) -> int:
    opts = _merge_options(args, {**_MODEL_DEFAULTS, **_INTEGRATOR_DEFAULTS,
                                 **_SWEEP_DEFAULTS, "from_files": None,
                                 "etas": None, "out": None, "quantity": "sup_density",
                                 "log100_ordinate": False, "linear_axes": False,
                                 "title": None})
    branches = []
    if opts["from_files"]:
        for path in opts["from_files"]:
            text = Path(path).read_text()
            branches.append(serialize.branch_from_json(text)
                            if str(path).endswith(".json")
                            else serialize.branch_from_csv(text))
    elif opts["etas"] is not None:
        if opts.get("model") is None:
            raise CliError("--etas requires --model")
        for eta in (float(v) for v in str(opts["etas"]).split(",")):
            sub_opts = dict(opts)
            sub_opts["eta"] = eta
            if eta == 0.0 and opts["model"] != "fd":
                sub_opts["model"] = "mb"
            branches.append(_trace(sub_opts)[0])
    else:
        raise CliError("diagram needs either --from files or --model with --etas")
    try:
        style = diagrams.DiagramStyle(quantity=opts["quantity"],
                                      log1p_axes=not opts["linear_axes"],
                                      log100_ordinate=bool(opts["log100_ordinate"]),
                                      title=opts["title"])
        svg = diagrams.emit_diagram(branches, style)
    except ValueError as exc:
        raise CliError(str(exc))
    _write(opts["out"], svg)
    return 0


_HANDLERS = {"fermi": _cmd_fermi, "solve": _cmd_solve, "trace": _cmd_trace,
             "turning-points": _cmd_turning_points, "count": _cmd_count,
             "energy": _cmd_energy, "validate": _cmd_validate,
             "diagram": _cmd_diagram}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IntegrationError, branch_mod.BranchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
