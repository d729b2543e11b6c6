"""Command-line surface: simulate, calibrate, validate, convergence.

Every simulation output is accompanied by a manifest (resolved
configuration, input digests, tool version, wall-clock duration) so a run
can be reproduced bit for bit.  Messages go to stderr; files to --out.

Exit codes: 0 ok; 1 input/validation error; 2 solver failure or calibration
budget exhaustion; 3 failed verification gate (stoichiometry or scheme
order).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .calibration import (
    calibrate,
    load_measurements,
    reduced_model_initial_guess,
    residual,
)
from .config import (
    build_calibration_settings,
    build_simulation_config,
    load_settings,
    resolved_config_dict,
)
from .convergence import (
    advection_spatial_errors,
    diffusion_mode_relative_error,
    observed_orders,
    scalar_imex_errors,
)
from .simulation import SimulationError, run, write_output_csv
from .svgchart import PointSeries, Series, write_line_chart

log = logging.getLogger("patina.cli")

STOICHIOMETRY_TOLERANCE = 5e-3   # both mole ratios must sit within 0.5% of 2
MIN_TEMPORAL_ORDER = 1.9


@dataclass
class RunManifest:
    """Reproducibility sidecar written next to every output."""

    command: str
    resolved_config: dict
    input_digests: dict[str, str] = field(default_factory=dict)
    tool_version: str = __version__
    duration_seconds: float = 0.0

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.__dict__, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _digests(paths) -> dict[str, str]:
    return {str(p): _sha256(p) for p in paths if p}


def _setup_logging() -> None:
    level_name = os.environ.get("PATINA_LOG", "warn").lower()
    levels = {"error": logging.ERROR, "warn": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
    if level_name not in levels:
        print(f"patina: unknown PATINA_LOG level {level_name!r}; using warn",
              file=sys.stderr)
        level_name = "warn"
    logging.basicConfig(level=levels[level_name],
                        format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


def _forcing_mode(args) -> str | None:
    if getattr(args, "env", None):
        return "timeseries"
    if getattr(args, "chamber", False):
        return "chamber"
    if getattr(args, "cycles", False):
        return "cycles"
    return None


def _sim_config(args, horizon=None):
    cp = load_settings(args.config)
    return cp, build_simulation_config(
        cp,
        forcing_mode=_forcing_mode(args),
        env_csv=getattr(args, "env", None),
        horizon_hours=horizon if horizon is not None else getattr(args, "horizon_hours", None),
        seed_a=getattr(args, "seed_a", None),
        seed_b=getattr(args, "seed_b", None),
        central_advection=getattr(args, "central_advection", False),
    )


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    _, cfg = _sim_config(args)
    output = run(cfg)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "simulation.csv")
    write_output_csv(output, csv_path)

    hours = [r.t_hours for r in output.records]
    write_line_chart(
        os.path.join(args.out, "fronts.svg"),
        [Series("a(t) copper front", hours, [r.a_cm for r in output.records]),
         Series("beta(t) cuprite/brochantite", hours, [r.beta_cm for r in output.records]),
         Series("gamma(t) outer surface", hours, [r.gamma_cm for r in output.records])],
        title="Front evolution",
        xlabel="time [h]",
        ylabel="position [cm]",
    )
    manifest = RunManifest(
        command="simulate",
        resolved_config=resolved_config_dict(cfg),
        input_digests=_digests([args.config, args.env]),
    )
    manifest.duration_seconds = time.perf_counter() - started
    manifest.write(os.path.join(args.out, "manifest.json"))
    final = output.records[-1]
    print(f"simulated {final.t_hours:.6g} h in {output.steps} steps; "
          f"total thickness {final.total_cm:.6g} cm -> {csv_path}")
    return 0


def cmd_calibrate(args) -> int:
    started = time.perf_counter()
    cp, cfg = _sim_config(args)
    settings = build_calibration_settings(cp, tie_dw_ds=args.tie_dw_ds)
    measurements = load_measurements(args.measurements)
    if len(measurements) == 1:
        print("patina: warning: single measurement point; under-determined fit",
              file=sys.stderr)
    horizon = max(cfg.horizon_hours, max(m.time_hours for m in measurements))
    cfg = build_simulation_config(
        cp, forcing_mode=_forcing_mode(args), env_csv=getattr(args, "env", None),
        horizon_hours=horizon, central_advection=args.central_advection)

    initial = reduced_model_initial_guess(measurements, cfg,
                                          oxide_share=settings.oxide_share)
    lo, hi = settings.bounds
    initial = type(initial)(*(min(max(v, lo), hi) for v in
                              (initial.d_g, initial.d_s, initial.d_o, initial.d_w)))
    result = calibrate(initial, settings.bounds, measurements, cfg,
                       tie_dw_ds=settings.tie_dw_ds, budget=settings.budget,
                       spread_tol=settings.spread_tol,
                       weighting=settings.weighting)

    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "calibration.csv")
    d = result.diffusivities
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# d_g = {d.d_g:.6g}\n# d_s = {d.d_s:.6g}\n")
        fh.write(f"# d_o = {d.d_o:.6g}\n# d_w = {d.d_w:.6g}\n")
        fh.write(f"# residual = {result.residual:.6g}\n")
        fh.write(f"# evaluations = {result.evaluations}\n")
        fh.write(f"# converged = {str(result.converged).lower()}\n")
        fh.write("time_hours,measured_cm,std_cm,predicted_cm\n")
        for m, pred in zip(measurements, result.predicted_cm):
            fh.write(f"{m.time_hours:.6g},{m.mean_cm:.6g},{m.std_cm:.6g},{pred:.6g}\n")

    fit_run = run(type(cfg)(**{**cfg.__dict__, "diffusivities": d}))
    hours = [r.t_hours for r in fit_run.records]
    write_line_chart(
        os.path.join(args.out, "comparison.svg"),
        [Series("fitted total thickness", hours,
                [r.total_cm for r in fit_run.records])],
        title="Calibrated model vs measurements",
        xlabel="time [h]",
        ylabel="total thickness [cm]",
        points=[PointSeries("measured", [m.time_hours for m in measurements],
                            [m.mean_cm for m in measurements],
                            [m.std_cm for m in measurements])],
    )
    manifest = RunManifest(
        command="calibrate",
        resolved_config=resolved_config_dict(cfg),
        input_digests=_digests([args.config, args.measurements]),
    )
    manifest.duration_seconds = time.perf_counter() - started
    manifest.write(os.path.join(args.out, "calibration_manifest.json"))

    print(f"calibrated: d_g={d.d_g:.4g} d_s={d.d_s:.4g} d_o={d.d_o:.4g} "
          f"d_w={d.d_w:.4g} residual={result.residual:.4g} "
          f"({result.evaluations} evaluations) -> {csv_path}")
    if not result.converged:
        print("patina: calibration budget exhausted; result is best-so-far",
              file=sys.stderr)
        return 2
    return 0


def cmd_validate(args) -> int:
    _, cfg = _sim_config(args)
    output = run(cfg)
    grown = ((output.final_fronts_cm.a - cfg.a0 * cfg.scales.lam)
             + (output.final_fronts_cm.b - cfg.b0 * cfg.scales.lam))
    report = output.mole_report
    if grown <= 1e-12 * cfg.scales.lam:
        print("no growth; ratios undefined")
        print("patina: warning: forcing produced no front motion", file=sys.stderr)
        return 0
    print(f"copper wasted        : {report.copper_wasted:.6g} mol/cm2")
    print(f"cuprite formed       : {report.cuprite_formed:.6g} mol/cm2")
    print(f"cuprite wasted       : {report.cuprite_wasted:.6g} mol/cm2")
    print(f"brochantite formed   : {report.brochantite_formed:.6g} mol/cm2")
    dev_cc = report.ratio_copper_cuprite / 2.0 - 1.0
    dev_cb = report.ratio_cuprite_brochantite / 2.0 - 1.0
    print(f"copper/cuprite ratio : {report.ratio_copper_cuprite:.6g} "
          f"(deviation {dev_cc:+.3%})")
    print(f"cuprite/brochantite  : {report.ratio_cuprite_brochantite:.6g} "
          f"(deviation {dev_cb:+.3%})")
    if math.isnan(dev_cc) or math.isnan(dev_cb) or \
            abs(dev_cc) > STOICHIOMETRY_TOLERANCE or abs(dev_cb) > STOICHIOMETRY_TOLERANCE:
        print("patina: stoichiometry gate FAILED", file=sys.stderr)
        return 3
    print("stoichiometry gate passed")
    return 0


def cmd_convergence(args) -> int:
    errors = scalar_imex_errors()
    orders = observed_orders(errors)
    print("scalar split test (u' = -u, H = G = -u/2):")
    for (dt, err), line_order in zip(errors, [None] + orders):
        suffix = "" if line_order is None else f"  order {line_order:.3f}"
        print(f"  dt = {dt:<6g} error = {err:.3e}{suffix}")
    scheme = "central" if args.central_advection else "upwind"
    adv = advection_spatial_errors(scheme=scheme)
    adv_orders = observed_orders(adv)
    print(f"advection bump, {scheme} differencing:")
    for (h, err), line_order in zip(adv, [None] + adv_orders):
        suffix = "" if line_order is None else f"  order {line_order:.3f}"
        print(f"  h = {h:<8g} error = {err:.3e}{suffix}")
    diff_err = diffusion_mode_relative_error()
    print(f"diffusion eigenmode relative error: {diff_err:.3e}")
    min_temporal = min(orders)
    if min_temporal < MIN_TEMPORAL_ORDER:
        print(f"patina: temporal order {min_temporal:.3f} below "
              f"{MIN_TEMPORAL_ORDER}", file=sys.stderr)
        return 3
    print(f"temporal order {min_temporal:.3f} >= {MIN_TEMPORAL_ORDER}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patina",
        description="Copper patina growth under SO2: simulate, calibrate, verify.",
    )
    parser.add_argument("--version", action="version", version=f"patina {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default):
        p.add_argument("--config", metavar="PATH", default=None,
                       help="config file (defaults built in)")
        p.add_argument("--out", metavar="DIR", default=out_default)
        p.add_argument("--central-advection", action="store_true",
                       help="central differencing instead of upwinding")

    p_sim = sub.add_parser("simulate", help="run the model and write CSV/SVG output")
    common(p_sim, "out")
    group = p_sim.add_mutually_exclusive_group()
    group.add_argument("--chamber", action="store_true",
                       help="constant corrosion-chamber forcing")
    group.add_argument("--cycles", action="store_true",
                       help="wet/dry cycle forcing")
    group.add_argument("--env", metavar="PATH", default=None,
                       help="environmental time-series CSV")
    p_sim.add_argument("--horizon-hours", type=float, default=None)
    p_sim.add_argument("--seed-a", type=float, default=None)
    p_sim.add_argument("--seed-b", type=float, default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_cal = sub.add_parser("calibrate", help="fit diffusivities to thickness data")
    common(p_cal, "out")
    p_cal.add_argument("--measurements", metavar="PATH", required=True)
    p_cal.add_argument("--env", metavar="PATH", default=None, help=argparse.SUPPRESS)
    p_cal.add_argument("--chamber", action="store_true")
    p_cal.add_argument("--cycles", action="store_true")
    p_cal.add_argument("--tie-dw-ds", action=argparse.BooleanOptionalAction,
                       default=None,
                       help="tie the water diffusivity to the SO2 one (default on)")
    p_cal.set_defaults(func=cmd_calibrate)

    p_val = sub.add_parser("validate", help="run the stoichiometry gate")
    common(p_val, "out")
    p_val.add_argument("--chamber", action="store_true")
    p_val.add_argument("--cycles", action="store_true")
    p_val.add_argument("--env", metavar="PATH", default=None)
    p_val.add_argument("--horizon-hours", type=float, default=None)
    p_val.set_defaults(func=cmd_validate)

    p_conv = sub.add_parser("convergence", help="measure scheme orders")
    common(p_conv, "out")
    p_conv.set_defaults(func=cmd_convergence)
    return parser


def run_main(argv=None) -> int:
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"patina: file not found: {exc.filename or exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"patina: {exc}", file=sys.stderr)
        return 1
    except SimulationError as exc:
        print(f"patina: solver failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_main())
