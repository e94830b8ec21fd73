"""Command-line scenario runner.

Subcommands: run, plot, fit, feasibility, list-golden.  Exit codes:
0 success, 1 validation error, 2 numerical failure, 3 success with a
truncation warning.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import runner
from .config import parse_feasibility, parse_scenario
from .errors import IllConditionedFit, IntegrationError
from .plotting import emit_plot
from .tomography import fit_distribution, read_scan

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_TRUNCATION = 3


def _read_text(path: str) -> str:
    if path.startswith("golden:"):
        return runner.golden_text(path.removeprefix("golden:"))
    return Path(path).read_text()


def _cmd_run(args) -> int:
    config = parse_scenario(_read_text(args.config))
    result, csv_path = runner.run_scenario(config, args.out_dir)
    print(f"wrote {csv_path} ({len(result.times)} samples)")
    print(f"conservation drift {result.drift:.3e}, leakage {result.leakage_max:.3e}")
    if result.truncation_flag:
        print("warning: Fock truncation leakage exceeded 1e-6", file=sys.stderr)
        return EXIT_TRUNCATION
    return EXIT_OK


def _cmd_plot(args) -> int:
    out = args.out or Path(args.csv).with_suffix(".svg")
    path = emit_plot(args.csv, args.cols or [], out)
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_fit(args) -> int:
    red = read_scan(_scan_path(args.red_scan))
    blue = read_scan(_scan_path(args.blue_scan))
    fit = fit_distribution(red, blue, n_max=args.n_max)
    dist = fit.distribution
    print(f"{'n':>3} {'P_g':>10} {'sigma':>9} {'P_e':>10} {'sigma':>9}")
    for n in range(dist.n_max + 1):
        print(
            f"{n:>3} {dist.p_g[n]:>10.5f} {fit.sigma_g[n]:>9.5f} "
            f"{dist.p_e[n]:>10.5f} {fit.sigma_e[n]:>9.5f}"
        )
    print(f"mean phonon number: {fit.mean_phonon:.4f} +- {fit.mean_phonon_sigma:.4f}")
    print(f"residual norm {fit.residual_norm:.4e}, condition number {fit.condition_number:.3e}")
    return EXIT_OK


def _scan_path(path: str):
    if path.startswith("golden:"):
        return runner.golden_dir() / path.removeprefix("golden:")
    return path


def _cmd_feasibility(args) -> int:
    inputs = parse_feasibility(_read_text(args.config))
    est = runner.feasibility_estimate(inputs)
    print(f"dimensionless amplitude u = {est['u']:.4e}")
    print(f"effective coupling g_eff/2pi = {est['g_eff'] / (2 * 3.141592653589793):.4e} Hz")
    print(f"excitation rate = {est['rate_hz'] * 1e3:.4f} mHz")
    print(f"excitations per lifetime = {est['excitations_per_lifetime']:.4f}")
    return EXIT_OK


def _cmd_list_golden(_args) -> int:
    for name in runner.list_golden():
        print(name)
    print("\nuse 'golden:<name>' as a config or scan argument to run a bundled file")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modrabi",
        description="Simulate a two-level detector coupled to a cavity mode "
        "through a trajectory-modulated coupling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config and write a CSV trace")
    p_run.add_argument("config", help="path to a scenario YAML (or golden:<name>)")
    p_run.add_argument("--out-dir", default=".", help="directory for the CSV output")
    p_run.set_defaults(func=_cmd_run)

    p_plot = sub.add_parser("plot", help="render CSV columns as an SVG line plot")
    p_plot.add_argument("csv", help="CSV file produced by run")
    p_plot.add_argument("--cols", nargs="+", help="columns to draw (default: all)")
    p_plot.add_argument("--out", help="output SVG path (default: CSV name with .svg)")
    p_plot.set_defaults(func=_cmd_plot)

    p_fit = sub.add_parser("fit", help="fit one red and one blue sideband scan")
    p_fit.add_argument("red_scan", help="red scan file (or golden:<name>)")
    p_fit.add_argument("blue_scan", help="blue scan file (or golden:<name>)")
    p_fit.add_argument("--n-max", type=int, default=5, help="population truncation")
    p_fit.set_defaults(func=_cmd_fit)

    p_feas = sub.add_parser("feasibility", help="direct-observation rate estimate")
    p_feas.add_argument("config", help="feasibility YAML (or golden:<name>)")
    p_feas.set_defaults(func=_cmd_feasibility)

    p_list = sub.add_parser("list-golden", help="list bundled golden configs and scans")
    p_list.set_defaults(func=_cmd_list_golden)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (IntegrationError, IllConditionedFit) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
