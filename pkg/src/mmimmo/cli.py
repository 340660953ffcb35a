"""Command-line entry point.

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .channel import validate_rays
from .geometry import CarrierConfig, GeometryError, compute_num_streams, compute_spacing
from .report import emit_plots, emit_results
from .scenario import CATALOGS, ConfigError, load_scenarios, run_suite

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


def _summary(r):
    return (f"scenario={r.name} se={r.se:.4f} phi_svd={r.phi_svd:.2f} "
            f"phi_fs={r.phi_fs:.2f} n_u={r.n_u} n={r.n_antennas}")


def _emit(results, out: Path, csv_: bool, json_: bool, plots: bool, stem: str):
    out.mkdir(parents=True, exist_ok=True)
    if not (csv_ or json_):
        csv_ = json_ = True
    if csv_:
        emit_results(results, "csv", out / f"{stem}.csv")
    if json_:
        emit_results(results, "json", out / f"{stem}.json")
    if plots and results:
        emit_plots(results, out / "plots")


def _run_and_report(scenarios, args, stem):
    results, failures = run_suite(scenarios, workers=getattr(args, "workers", 1))
    for r in results:
        print(_summary(r))
    for f in failures:
        print(f"error: {f}", file=sys.stderr)
    _emit(results, args.out, args.csv, args.json, args.plots, stem)
    return EXIT_NUMERIC if failures else EXIT_OK


def cmd_run(args) -> int:
    try:
        scenarios = load_scenarios(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return _run_and_report(scenarios, args, "results")


def cmd_suite(args) -> int:
    if args.catalog in CATALOGS:
        scenarios = CATALOGS[args.catalog](distance_error=args.distance_error)
    else:
        try:
            scenarios = load_scenarios(args.catalog)
        except (ConfigError, OSError) as exc:
            print(f"catalog error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    return _run_and_report(scenarios, args, args.catalog if args.catalog in CATALOGS else "results")


def cmd_params(args) -> int:
    for name in ("length", "distance", "freq", "step"):
        if not getattr(args, name) > 0:
            print(f"error: --{name} must be positive", file=sys.stderr)
            return EXIT_INPUT
    lam = CarrierConfig(args.freq).wavelength
    try:
        n_u = compute_num_streams(args.length, lam, args.distance)
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    d = compute_spacing(lam, args.distance, n_u, args.step)
    print(f"{'wavelength_m':>14} {'N_U':>6} {'d_mm':>10} {'N_U_d_m':>10} {'D_over_dNU':>11}")
    print(f"{lam:14.7f} {n_u:6d} {d * 1e3:10.4f} {n_u * d:10.4f} {args.distance / (d * n_u):11.4f}")
    return EXIT_OK


def cmd_rays_validate(args) -> int:
    path = Path(args.file)
    if not path.is_file():
        print(f"error: {path} not found", file=sys.stderr)
        return EXIT_INPUT
    try:
        field, errors = validate_rays(path)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for e in errors:
        print(f"{path}:{e}", file=sys.stderr)
    if len(field) == 0 and not errors:
        print("warning: 0 rays", file=sys.stderr)
    counts = field.rays_per_pair() if len(field) else None
    covered = int((counts > 0).sum()) if counts is not None else 0
    total = counts.size if counts is not None else 0
    print(f"rays={len(field)} shape={field.shape[0]}x{field.shape[1]} "
          f"pairs_covered={covered}/{total} errors={len(errors)}")
    return EXIT_INPUT if errors else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mmimmo", description="LOS massive-MIMO backhaul link simulator")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def outputs(sp):
        sp.add_argument("--out", type=Path, required=True, help="output directory")
        sp.add_argument("--csv", action="store_true", help="write results CSV")
        sp.add_argument("--json", action="store_true", help="write results JSON")
        sp.add_argument("--plots", action="store_true", help="write SVG charts")
        sp.add_argument("--workers", type=int, default=1, help="parallel scenario evaluations")

    r = sub.add_parser("run", help="run the scenario(s) in a config file")
    r.add_argument("--config", type=Path, required=True)
    outputs(r)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("suite", help="run a built-in catalog or a list of configs")
    s.add_argument("--catalog", default="table2-fs")
    s.add_argument("--distance-error", type=float, default=0.0,
                   help="add this offset (m) to every true link distance")
    outputs(s)
    s.set_defaults(func=cmd_suite)

    pp = sub.add_parser("params", help="compute stream count and spacing for a deployment")
    pp.add_argument("--length", type=float, required=True, help="available array length (m)")
    pp.add_argument("--distance", type=float, required=True, help="estimated link distance (m)")
    pp.add_argument("--freq", type=float, default=26e9, help="carrier frequency (Hz)")
    pp.add_argument("--step", type=float, default=1e-4, help="positioning step (m)")
    pp.set_defaults(func=cmd_params)

    v = sub.add_parser("rays-validate", help="check a ray file")
    v.add_argument("file")
    v.set_defaults(func=cmd_rays_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; usage errors are input errors here
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
