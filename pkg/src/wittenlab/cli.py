"""Command-line interface.

Exit codes: 0 success, 1 usage/config error, 2 non-convergent result
(non-convergence still writes every table so the sweep can be inspected).
Every run writes a manifest.json; data artifacts are byte-deterministic for
a fixed config and seed, the manifest carries wall-clock timings and is not.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import os
import sys
import time

import numpy as np

from .artifacts import (
    build_manifest,
    ensure_out_dir,
    format_float,
    report_payload,
    sampled_csv,
    step_function_csv,
    write_csv,
    write_json,
)
from .config import ConfigError, RunConfig, load_config
from .model import ResourceCapExceeded, discretize, fredholm_check, essential_spectrum_strips, resolvent_trace_check
from .rankone import DiscreteMeasure, classify_spectral_type, matrix_oracle, xi_alpha
from .ssf import index_counting, ssf_pair, ssf_via_logdet
from .stepfun import SampledFunction, StepFunction
from .transforms import abel_F, pushnitski_forward
from .witten import full_report, witten_from_ssf

COMMANDS = ("witten", "ssf", "pushnitski", "abel", "rankone", "fredholm", "trace-check")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the interface contract
    # reserves 2 for non-convergent results, so route usage errors to 1
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="wittenlab",
        description="Fredholm and Witten indices of d/dt + A(t) via spectral shift functions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} pipeline")
        p.add_argument("--config", required=True, help="TOML run configuration")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument(
            "--threads",
            type=int,
            default=None,
            help="worker thread cap for the linear algebra backend (default: logical cores)",
        )
        p.add_argument("--seed", type=int, default=None, help="seed echoed into the manifest")
    return parser


@contextlib.contextmanager
def _thread_limit(threads):
    if threads is None:
        yield
        return
    if threads < 1:
        raise ConfigError(f"--threads: must be >= 1, got {threads}")
    import threadpoolctl

    with threadpoolctl.threadpool_limits(limits=threads):
        yield


def _schedule_callable(values):
    if values is None:
        return None
    arr = np.asarray(values, dtype=float)
    return lambda L: arr


# -- subcommand bodies: each returns (exit status, artifact names) -----------


def cmd_witten(cfg: RunConfig):
    path = cfg.require_path()
    report = full_report(
        path,
        resolutions=cfg.resolutions,
        window=cfg.window,
        schedules_r=_schedule_callable(cfg.lambda_schedule),
        schedules_s=_schedule_callable(cfg.time_schedule),
    )
    names = ["report.json", "delta_r.csv", "delta_s.csv", "xi_A.csv", "xi_H.csv"]
    out = cfg.out_dir
    write_json(os.path.join(out, "report.json"), report_payload(report))
    write_csv(
        os.path.join(out, "delta_r.csv"),
        ["L", "N", "lambda", "delta_r"],
        report.W_resolvent.table,
    )
    write_csv(
        os.path.join(out, "delta_s.csv"),
        ["L", "N", "t", "delta_s"],
        report.W_semigroup.table,
    )
    step_function_csv(os.path.join(out, "xi_A.csv"), report.xi_A)
    sampled_csv(os.path.join(out, "xi_H.csv"), report.xi_H, "lambda", "xi")
    if "png" in cfg.formats:
        from .plots import render_witten_figures

        names += render_witten_figures(out, report)
    w = report.W_xi
    print(f"W_xi = {w} ; resolvent {format_float(report.W_resolvent.estimate)} "
          f"+/- {format_float(report.W_resolvent.uncertainty)} ; semigroup "
          f"{format_float(report.W_semigroup.estimate)} +/- "
          f"{format_float(report.W_semigroup.uncertainty)}")
    if not report.converged:
        print("non-convergent: no stable plateau at the requested resolutions", file=sys.stderr)
    return (0 if report.converged else 2), names


def cmd_ssf(cfg: RunConfig):
    path = cfg.require_path()
    extras = cfg.extras.get("ssf", {})
    eps = float(extras.get("eps", 1e-5))
    xi = ssf_pair(path.A_plus, path.A_minus)
    strips = essential_spectrum_strips(path)
    lo = extras.get("grid_lo", min(strips) - 1.0)
    hi = extras.get("grid_hi", max(strips) + 1.0)
    n = int(extras.get("grid_points", 241))
    if not (hi > lo and n >= 2):
        raise ConfigError("ssf.grid_lo/grid_hi/grid_points: need lo < hi and >= 2 points")
    grid = np.linspace(lo, hi, n)
    boundary = ssf_via_logdet(path.A_plus, path.A_minus, eps, grid)

    counting = index_counting(path.A_plus, path.A_minus)
    w_xi = witten_from_ssf(xi)
    left, right = xi.limits_at(0.0)
    summary = {
        "W_xi": w_xi,
        "index_counting": counting,
        "identity_holds": w_xi == counting,
        "xi_left_at_0": left,
        "xi_right_at_0": right,
        "eps": eps,
    }
    out = cfg.out_dir
    names = ["xi_A.csv", "logdet_scan.csv", "ssf_summary.json"]
    step_function_csv(os.path.join(out, "xi_A.csv"), xi)
    sampled_csv(os.path.join(out, "logdet_scan.csv"), boundary, "lambda", "xi_boundary")
    write_json(os.path.join(out, "ssf_summary.json"), summary)
    if "png" in cfg.formats:
        from .plots import render_curve, render_step

        names.append(render_step(out, "xi_A.png", xi, "nu", "shift"))
        names.append(
            render_curve(out, "logdet_scan.png", boundary.abscissae,
                         boundary.ordinates, "lambda", "boundary phase / pi")
        )
    print(f"W_xi = {w_xi} ; counting = {counting} ; identity holds: {w_xi == counting}")
    return 0, names


def _prescribed_step(extras: dict, section: str) -> StepFunction | None:
    bps = extras.get("breakpoints")
    vals = extras.get("values")
    if bps is None and vals is None:
        return None
    if bps is None or vals is None:
        raise ConfigError(f"{section}.breakpoints/values: both lists are required")
    try:
        return StepFunction(bps, vals)
    except ValueError as exc:
        raise ConfigError(f"{section}.breakpoints/values: {exc}") from exc


def cmd_pushnitski(cfg: RunConfig):
    extras = cfg.extras.get("pushnitski", {})
    xi = _prescribed_step(extras, "pushnitski")
    if xi is None:
        path = cfg.require_path()
        xi = ssf_pair(path.A_plus, path.A_minus)
    lo = float(extras.get("lambda_min", 1e-2))
    hi = float(extras.get("lambda_max", 25.0))
    n = int(extras.get("points", 200))
    if not (0 < lo < hi and n >= 2):
        raise ConfigError("pushnitski.lambda_min/lambda_max/points: need 0 < min < max, >= 2 points")
    grid = np.geomspace(lo, hi, n)
    fwd = pushnitski_forward(xi, grid)
    out = cfg.out_dir
    names = ["xi_input.csv", "pushnitski.csv"]
    step_function_csv(os.path.join(out, "xi_input.csv"), xi)
    sampled_csv(os.path.join(out, "pushnitski.csv"), fwd, "lambda", "xi_H")
    if "png" in cfg.formats:
        from .plots import render_curve

        names.append(
            render_curve(out, "pushnitski.png", fwd.abscissae, fwd.ordinates,
                         "lambda", "transformed shift", logx=True)
        )
    print(f"transformed {len(grid)} points on [{format_float(lo)}, {format_float(hi)}]")
    return 0, names


def cmd_abel(cfg: RunConfig):
    extras = cfg.extras.get("abel", {})
    kind = extras.get("kind", "resolvent")
    lo = float(extras.get("nu_min", -5.0))
    hi = float(extras.get("nu_max", 5.0))
    n = int(extras.get("points", 201))
    if not (hi > lo and n >= 2):
        raise ConfigError("abel.nu_min/nu_max/points: need min < max and >= 2 points")
    if kind == "resolvent":
        z = float(extras.get("z", -1.0))
        if z >= 0.0:
            raise ConfigError(f"abel.z: must be negative, got {z}")
        f = lambda x: 1.0 / (x - z)
        param = {"z": z}
    elif kind == "heat":
        s = float(extras.get("s", 1.0))
        if not s > 0:
            raise ConfigError(f"abel.s: must be positive, got {s}")
        f = lambda x: math.exp(-s * x)
        param = {"s": s}
    else:
        raise ConfigError(f"abel.kind: expected 'resolvent' or 'heat', got {kind!r}")
    grid = np.linspace(lo, hi, n)
    vals = np.array([abel_F(f, float(nu)) for nu in grid])
    fn = SampledFunction(grid, vals, metadata={"kind": kind, **param})
    out = cfg.out_dir
    names = ["abel.csv"]
    sampled_csv(os.path.join(out, "abel.csv"), fn, "nu", "F")
    if "png" in cfg.formats:
        from .plots import render_curve

        names.append(render_curve(out, "abel.png", grid, vals, "nu", "F"))
    print(f"abel transform of the {kind} symbol on {n} points")
    return 0, names


def cmd_rankone(cfg: RunConfig):
    extras = cfg.extras.get("rankone", {})
    if "positions" not in extras or "weights" not in extras:
        raise ConfigError("rankone.positions/weights: both lists are required")
    try:
        measure = DiscreteMeasure(
            np.asarray(extras["positions"], dtype=float),
            np.asarray(extras["weights"], dtype=float),
        )
    except ValueError as exc:
        raise ConfigError(f"rankone.positions/weights: {exc}") from exc
    alpha = float(extras.get("alpha", 1.0))
    if alpha == 0.0:
        raise ConfigError("rankone.alpha: must be nonzero")
    eps = float(extras.get("eps", 1e-6))
    if not eps > 0:
        raise ConfigError("rankone.eps: must be positive")
    span = measure.positions[-1] - measure.positions[0] + 1.0
    lo = float(extras.get("lambda_min", measure.positions[0] - span))
    hi = float(extras.get("lambda_max", measure.positions[-1] + (abs(alpha) + 1.0) * span))
    n = int(extras.get("points", 401))
    if not (hi > lo and n >= 2):
        raise ConfigError("rankone.lambda_min/lambda_max/points: need min < max and >= 2 points")
    grid = np.linspace(lo, hi, n)
    vals = np.array([xi_alpha(measure, alpha, float(x), eps) for x in grid])
    oracle = matrix_oracle(measure, alpha)
    report = classify_spectral_type(measure, alpha)
    payload = {
        "alpha": alpha,
        "eps": eps,
        "total_mass": report.total_mass,
        "recovered_mass": report.recovered_mass,
        "mass_defect": report.mass_defect,
        "roots": [
            {"location": r.location, "g0": r.g0, "weight": r.weight, "label": r.label}
            for r in report.roots
        ],
        "ac_intervals": list(report.ac_intervals),
    }
    out = cfg.out_dir
    names = ["xi_alpha.csv", "xi_oracle.csv", "spectral_type.json"]
    sampled_csv(
        os.path.join(out, "xi_alpha.csv"),
        SampledFunction(grid, vals, {"alpha": alpha, "eps": eps}),
        "lambda",
        "xi_alpha",
    )
    step_function_csv(os.path.join(out, "xi_oracle.csv"), oracle)
    write_json(os.path.join(out, "spectral_type.json"), payload)
    if "png" in cfg.formats:
        from .plots import render_curve

        names.append(render_curve(out, "xi_alpha.png", grid, vals, "lambda", "xi_alpha"))
    print(
        f"{len(report.roots)} perturbed atoms, mass defect {format_float(report.mass_defect)}"
    )
    return 0, names


def cmd_fredholm(cfg: RunConfig):
    path = cfg.require_path()
    extras = cfg.extras.get("fredholm", {})
    tol = float(extras.get("tol", 1e-8))
    res = fredholm_check(path, tol)
    strips = essential_spectrum_strips(path)
    payload = {**res, "tol": tol, "essential_spectrum_abscissae": strips}
    out = cfg.out_dir
    write_json(os.path.join(out, "fredholm.json"), payload)
    verdict = "Fredholm" if res["fredholm"] else "not Fredholm"
    print(
        f"{verdict}, gap_plus={format_float(res['gap_plus'])}, "
        f"gap_minus={format_float(res['gap_minus'])}"
    )
    return 0, ["fredholm.json"]


def cmd_trace_check(cfg: RunConfig):
    path = cfg.require_path()
    extras = cfg.extras.get("trace_check", {})
    z_list = extras.get("z", [-1.0, -0.25, -4.0])
    tol = float(extras.get("tol", 1e-2))
    L, N = cfg.resolutions[-1]
    model = discretize(path, L, N)
    rows = []
    worst = 0.0
    for z in z_list:
        z = complex(z)
        lhs, rhs, rel = resolvent_trace_check(model, z)
        worst = max(worst, rel)
        rows.append((z.real, z.imag, lhs.real, lhs.imag, rhs.real, rhs.imag, rel))
    out = cfg.out_dir
    write_csv(
        os.path.join(out, "trace_check.csv"),
        ["z_re", "z_im", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_err"],
        rows,
    )
    summary = {"L": L, "N": N, "tol": tol, "max_rel_err": worst, "pass": worst <= tol}
    write_json(os.path.join(out, "trace_summary.json"), summary)
    print(f"max relative error {format_float(worst)} at L={L:g}, N={N} (tol {format_float(tol)})")
    return (0 if worst <= tol else 2), ["trace_check.csv", "trace_summary.json"]


_HANDLERS = {
    "witten": cmd_witten,
    "ssf": cmd_ssf,
    "pushnitski": cmd_pushnitski,
    "abel": cmd_abel,
    "rankone": cmd_rankone,
    "fredholm": cmd_fredholm,
    "trace-check": cmd_trace_check,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = load_config(args.config, args.out, args.seed, args.threads)
        ensure_out_dir(cfg.out_dir)
        started = time.perf_counter()
        with _thread_limit(cfg.threads):
            status, names = _HANDLERS[args.command](cfg)
        elapsed = time.perf_counter() - started
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ResourceCapExceeded, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    manifest = build_manifest(
        args.command, cfg, {"total": elapsed}, list(names) + ["manifest.json"]
    )
    write_json(os.path.join(cfg.out_dir, "manifest.json"), manifest)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
