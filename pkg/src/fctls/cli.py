"""Command-line interface.

Subcommands:
  run PRESET-OR-CONFIG   simulate a scenario, write trace + summary (+ plots)
  plot TRACE             render SVG plots from an existing trace
  presets                list built-in scenario names

Exit codes: 0 success, 2 configuration errors, 3 numerical errors, 4 I/O.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .errors import EstimationError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fctls",
        description=(
            "Continuous-time least-squares parameter estimation with "
            "finite-convergence-time reconstruction"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario (preset name or config file)")
    run.add_argument("scenario", help="preset name or path to a key=value config file")
    run.add_argument("--seed", type=int, default=None, help="override noise.seed")
    run.add_argument(
        "--noise-std", type=float, default=None,
        help="override noise.std_dev (a positive value also enables noise)",
    )
    run.add_argument("--step", type=float, default=None, help="override integration.step")
    run.add_argument("--t-end", type=float, default=None, help="override integration.t_end")
    run.add_argument("--out-dir", default=".", help="directory for trace/summary outputs")
    run.add_argument(
        "--plots-dir", default=None,
        help="also render SVG plots into this directory (relative to --out-dir)",
    )
    run.add_argument(
        "--engine", choices=("fused", "reference"), default="fused",
        help="simulation engine (reference is the slow step-by-step path)",
    )

    plot = sub.add_parser("plot", help="render SVG plots from a trace")
    plot.add_argument("trace", help="path to a CSV trace")
    plot.add_argument("--out-dir", default="plots", help="directory for the SVG files")
    plot.add_argument(
        "--summary", default=None,
        help="summary JSON holding the true parameters (default: sibling file)",
    )
    plot.add_argument(
        "--theta", default=None,
        help="true parameters as 'a,b,c' (overrides the summary lookup)",
    )

    sub.add_parser("presets", help="list built-in scenarios")
    return parser


def _cmd_run(args) -> int:
    from .scenario import apply_overrides, load_scenario, run_scenario

    config = load_scenario(args.scenario)
    config = apply_overrides(
        config,
        seed=args.seed,
        noise_std=args.noise_std,
        step=args.step,
        t_end=args.t_end,
        plots_dir=args.plots_dir,
    )
    summary = run_scenario(config, out_dir=args.out_dir, engine=args.engine)
    outputs = config.outputs.resolved(config.name)
    print(f"scenario:          {summary.scenario}")
    print(f"rows:              {summary.rows}")
    print(f"t_c:               {summary.t_c}")
    print(f"first gate open:   {summary.fct_first_valid_time}")
    for name in sorted(summary.final_errors):
        print(f"final error {name:<12} {summary.final_errors[name]:.6g}")
    if summary.max_abs_error_after_fct is not None:
        print(f"max |fct-theta| after validity: {summary.max_abs_error_after_fct:.6g}")
    print(f"wall time:         {summary.wall_time_s:.3f} s")
    print(f"trace:             {outputs.trace}")
    print(f"summary:           {outputs.summary}")
    return 0


def _cmd_plot(args) -> int:
    from .plots import render_plots

    theta = None
    if args.theta is not None:
        theta = [float(v) for v in args.theta.split(",")]
    written = render_plots(
        args.trace, args.out_dir, theta_true=theta, summary_path=args.summary
    )
    for path in written:
        print(path)
    return 0


def _cmd_presets() -> int:
    from .scenario import PRESET_DESCRIPTIONS, preset_names

    for name in preset_names():
        print(f"{name:<16} {PRESET_DESCRIPTIONS[name]}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "plot":
            return _cmd_plot(args)
        return _cmd_presets()
    except EstimationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
