"""Command-line front end.

Subcommands:
    sweep    analytical deflection/temperature curve over a thermal-load range
    fem      incremental-temperature finite-element run
    compare  RMS deviation of model curves against an experimental CSV + overlay
    props    tabulate E(T) and alpha(T) for inspection

Exit codes: 0 on success, 2 when results were produced but some points or
steps did not converge (output is still written), 1 on invalid input with a
diagnostic naming the offending field or file.  Outputs are deterministic:
identical inputs give byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ._ioutil import atomic_write_text, format_float
from .compare import (
    export_overlay,
    load_experiment,
    model_curve_from_csv,
    rms_deviation,
)
from .config import load_config, resolve_imperfection_q, resolve_sweep_range
from .elastica import sweep, write_sweep_csv
from .errors import ConvergenceError, MicrobeamError
from .fem import build_model, solve_path, write_path_csv
from .materials import cte, young_modulus

PROPS_CSV_HEADER = "temperature_c,young_modulus_pa,cte_per_c"


def _out_path(cfg, out_arg: str | None, default_name: str) -> Path:
    if out_arg is not None:
        return Path(out_arg)
    return cfg.output_directory / default_name


def _with_suffix(path: Path, tag: str) -> Path:
    return path.with_name(f"{path.stem}_{tag}{path.suffix or '.csv'}")


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    mode = args.mode or cfg.sweep_mode
    p_min, p_max = resolve_sweep_range(cfg)
    out = _out_path(cfg, args.out, "sweep.csv")
    modes = ("constant", "tdep") if mode == "both" else (mode,)
    any_unconverged = False
    for m in modes:
        states = sweep(
            cfg.geom,
            cfg.mat,
            p_min,
            p_max,
            cfg.sweep_n_points,
            mode=m,
            spacing=cfg.sweep_spacing,
            tol_T_c=cfg.sweep_tol_t_c,
            max_iter=cfg.sweep_max_iter,
        )
        target = _with_suffix(out, m) if mode == "both" else out
        write_sweep_csv(states, target)
        bad = sum(1 for s in states if not s.converged)
        any_unconverged = any_unconverged or bad > 0
        print(f"sweep[{m}]: {len(states)} points, {bad} unconverged -> {target}")
    return 2 if any_unconverged else 0


def cmd_fem(args) -> int:
    cfg = load_config(args.config)
    mode = args.mode or cfg.fem_mode
    model = build_model(cfg.geom, cfg.fem_n_elems, resolve_imperfection_q(cfg))
    out = _out_path(cfg, args.out, "fem.csv")
    modes = ("constant", "tdep") if mode == "both" else (mode,)
    partial = False
    for m in modes:
        try:
            path_result = solve_path(
                model,
                cfg.mat,
                cfg.fem_t_max_resolved_c,
                n_steps=cfg.fem_n_steps,
                tol_r=cfg.fem_tol_residual,
                tol_u=cfg.fem_tol_displacement,
                mode=m,
            )
            note = ""
        except ConvergenceError as exc:
            path_result = exc.result
            partial = True
            note = " (partial: a temperature step failed)"
        target = _with_suffix(out, m) if mode == "both" else out
        write_path_csv(path_result, target)
        print(f"fem[{m}]: {len(path_result.steps)} steps -> {target}{note}")
    return 2 if partial else 0


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    curves = [model_curve_from_csv(p) for p in args.model_csv]
    exp = load_experiment(args.experiment) if args.experiment else None
    # compute the full report before writing anything so an invalid pairing
    # exits without partial artifacts
    results = [(c, rms_deviation(c, exp)) for c in curves] if exp is not None else []
    base = _out_path(cfg, args.out, "overlay")
    csv_path = base.with_suffix(".csv")
    svg_path = base.with_suffix(".svg")
    export_overlay(curves, exp, csv_path, svg_path)
    print(f"overlay -> {csv_path}, {svg_path}")
    if exp is None:
        print("no experiment file given; RMS analysis skipped")
        return 0
    for curve, result in results:
        print(f"{curve.source}: RMS = {result.rms_m * 1e6:.6f} um "
              f"({result.excluded_count} point(s) outside model span)")
        print("  T_c        gamma_exp_um  residual_um")
        for t, d, r, inc in zip(
            exp.temperatures_c, exp.deflections_m, result.residuals_m, result.included
        ):
            tag = f"{r * 1e6:+12.6f}" if inc else "    excluded"
            print(f"  {t:<10.4g} {d * 1e6:<13.6f} {tag}")
    return 0


def cmd_props(args) -> int:
    cfg = load_config(args.config)
    t_min = args.t_min if args.t_min is not None else cfg.mat.T_0_c
    t_max = args.t_max if args.t_max is not None else 900.0
    if t_max < t_min:
        raise MicrobeamError(
            f"props range is descending: --t-min {t_min!r} > --t-max {t_max!r}"
        )
    n = args.n
    if n < 1:
        raise MicrobeamError(f"props --n must be >= 1, got {n!r}")
    temps = [t_min + (t_max - t_min) * i / (n - 1) for i in range(n)] if n > 1 else [t_min]
    rows = [PROPS_CSV_HEADER]
    print(f"{'T_c':>10}  {'E_pa':>14}  {'cte_per_c':>12}")
    for t in temps:
        e = young_modulus(cfg.mat, t)
        a = cte(cfg.mat, t)
        print(f"{t:>10.4f}  {e:>14.6e}  {a:>12.6e}")
        rows.append(f"{format_float(t)},{format_float(e)},{format_float(a)}")
    if args.out is not None:
        atomic_write_text(args.out, "\n".join(rows) + "\n")
        print(f"props -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microbeam",
        description="Thermal post-buckling of clamped-clamped micro beams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI config file (defaults are built in)")
        p.add_argument("--out", help="output path (default from config)")

    p_sweep = sub.add_parser("sweep", help="analytical deflection curve")
    common(p_sweep)
    p_sweep.add_argument("--mode", choices=("constant", "tdep", "both"))
    p_sweep.set_defaults(func=cmd_sweep)

    p_fem = sub.add_parser("fem", help="finite-element temperature ramp")
    common(p_fem)
    p_fem.add_argument("--mode", choices=("constant", "tdep", "both"))
    p_fem.set_defaults(func=cmd_fem)

    p_cmp = sub.add_parser("compare", help="model vs experiment RMS + overlay")
    common(p_cmp)
    p_cmp.add_argument("model_csv", nargs="+", help="model curve CSV file(s)")
    p_cmp.add_argument("--experiment", help="experimental CSV file")
    p_cmp.set_defaults(func=cmd_compare)

    p_props = sub.add_parser("props", help="tabulate E(T) and alpha(T)")
    common(p_props)
    p_props.add_argument("--t-min", type=float, default=None)
    p_props.add_argument("--t-max", type=float, default=None)
    p_props.add_argument("--n", type=int, default=23)
    p_props.set_defaults(func=cmd_props)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MicrobeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
