"""Command-line front end.

Exit codes: 0 on full success, 2 when a sweep completed only partially,
1 on argument or configuration errors and on failed single runs.  All
diagnostics go to stderr; results and file locations go to stdout.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .configfile import ConfigError, load_scenario
from .harness import (
    FIGURES,
    IntensityNotAchievableError,
    PinningError,
    Scenario,
    emit_figure_data,
    find_min_intensity,
    preset_names,
    run_scenario,
)
from .metrics import InconsistentTrajectoryError, InvalidDensityError
from .propagator import EVOLUTION_MODES, NORM_KINDS, NumericalInstabilityError


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; this tool reserves 2 for
    # partial sweep failures, so argument errors map to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_run_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--steps-per-half-period", type=int, default=None, metavar="K")
    parser.add_argument("--evolution", choices=EVOLUTION_MODES, default=None)
    parser.add_argument("--norm", choices=NORM_KINDS, default=None)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="aestsim",
        description="Pulse-controlled state transmission through an open XY spin chain",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a single configuration")
    p.add_argument("config", help="scenario configuration file")
    p.add_argument("--out", default=None, help="directory for CSV output")
    _add_run_overrides(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="run every sweep point of a configuration")
    p.add_argument("config")
    p.add_argument("--out", default=".")
    p.add_argument("--workers", type=int, default=0, help="0 = available parallelism")
    _add_run_overrides(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("figure", help="emit the preset data bundle for one figure")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=0)
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("min-intensity", help="smallest effective intensity reaching a fidelity target")
    p.add_argument("config")
    p.add_argument("--target", type=float, required=True)
    _add_run_overrides(p)
    p.set_defaults(func=_cmd_min_intensity)

    return parser


def _load_with_overrides(args) -> Scenario:
    scenario = load_scenario(args.config)
    cfg = scenario.config
    if args.steps_per_half_period is not None:
        cfg = replace(cfg, steps_per_half_period=args.steps_per_half_period)
    if args.evolution is not None:
        cfg = replace(cfg, evolution=args.evolution)
    if args.norm is not None:
        cfg = replace(cfg, rho_dot_norm_kind=args.norm)
    scenario.config = cfg
    return scenario


def _workers(requested: int) -> int:
    return requested if requested > 0 else (os.cpu_count() or 1)


def _cmd_simulate(args) -> int:
    scenario = _load_with_overrides(args)
    single = Scenario(scenario.name, scenario.config)
    rows, failures = run_scenario(single, args.out, workers=1)
    if failures:
        for f in failures:
            print(f"run failed: {f.scenario}: {f.message}", file=sys.stderr)
        return 1
    row = rows[0]
    print(
        f"{row.scenario}: F={row.final_fidelity:.6f} total_cost={row.total_cost:.6g} "
        f"tau_qsl={row.tau_qsl:.6g} lambda_t={row.lambda_t:.6g}"
    )
    return 0


def _cmd_sweep(args) -> int:
    scenario = _load_with_overrides(args)
    rows, failures = run_scenario(scenario, args.out, workers=_workers(args.workers))
    for f in failures:
        print(
            f"sweep point failed: {f.scenario} {scenario.sweep_parameter}={f.swept_value}: {f.message}",
            file=sys.stderr,
        )
    print(f"{scenario.name}: {len(rows)} rows written to {args.out}")
    if failures:
        return 2 if rows else 1
    return 0


def _cmd_figure(args) -> int:
    emit_figure_data(args.figure, args.out, workers=_workers(args.workers))
    print(f"{args.figure}: data written to {args.out}")
    return 0


def _cmd_min_intensity(args) -> int:
    scenario = _load_with_overrides(args)
    result = find_min_intensity(scenario, args.target)
    print(
        f"I_min={result.intensity:.17g} (m={result.multiple}) "
        f"F={result.fidelity:.6f} total_cost={result.cost.total:.17g}"
    )
    return 0


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (
        ConfigError,
        ValueError,
        OSError,
        NumericalInstabilityError,
        PinningError,
        IntensityNotAchievableError,
        InconsistentTrajectoryError,
        InvalidDensityError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
