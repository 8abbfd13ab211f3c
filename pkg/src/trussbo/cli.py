"""Command-line front end.

Subcommands:
  analyze   a b c theta1 theta2   solve one design and print its report
  optimize  config                run the Bayesian optimizer, write trace CSV
  baseline  config                run the random-search baseline likewise

Exit codes: 0 feasible success, 1 usage/config error, 2 completed but
infeasible. ``optimize``/``baseline`` also render a convergence figure next
to the CSV (suppress with --no-plot); ``analyze --plot FILE`` draws the
solved truss. The environment variable ``TRUSSBO_SEED`` is used when
neither --seed nor the config file provides one.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from . import report
from .bo import BOConfig, NoFeasibleDesignError, random_search, run
from .config import ConfigError, load_config
from .truss import (
    BoundsError,
    DesignParams,
    build_geometry,
    build_load_case,
    derive_design,
)
from .fea import analyze

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; route through our own codes
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="trussbo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="solve a single design")
    for name in ("a", "b", "c", "theta1", "theta2"):
        p_analyze.add_argument(name, type=float)
    p_analyze.add_argument("--config", type=Path, default=None,
                           help="config file for material/section/load")
    p_analyze.add_argument("--plot", type=Path, default=None,
                           help="render the solved truss to this image file")

    for command, helptext in (
        ("optimize", "run the Bayesian optimizer"),
        ("baseline", "run the uniform random-search baseline"),
    ):
        p = sub.add_parser(command, help=helptext)
        p.add_argument("config", type=Path)
        p.add_argument("--out", type=Path, default=Path("trace.csv"))
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--no-plot", action="store_true",
                       help="skip the convergence figure")
    return parser


def _resolve_seed(config: BOConfig, present: set[str], flag_seed: int | None) -> BOConfig:
    if flag_seed is not None:
        return dataclasses.replace(config, seed=flag_seed)
    if "seed" in present:
        return config
    env = os.environ.get("TRUSSBO_SEED")
    if env is not None:
        try:
            return dataclasses.replace(config, seed=int(env))
        except ValueError:
            raise _UsageError(f"TRUSSBO_SEED must be an integer, got {env!r}") from None
    return config


def _cmd_analyze(args) -> int:
    if args.config is not None:
        config, _ = load_config(args.config)
    else:
        config = BOConfig()
    params = DesignParams(args.a, args.b, args.c, args.theta1, args.theta2)
    design = derive_design(params)
    result = analyze(design, config.material, config.section, config.total_load)
    sys.stdout.write(report.analysis_report(design, result))
    if args.plot is not None:
        geometry = build_load_case(
            build_geometry(design, validate=False), config.total_load
        )
        report.render_truss_figure(
            args.plot, geometry, result.axial_forces,
            title=f"mass {report.fmt(result.mass)} kg",
        )
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def _cmd_search(args, driver) -> int:
    config, present = load_config(args.config)
    config = _resolve_seed(config, present, args.seed)
    try:
        trace, best = driver(config)
    except NoFeasibleDesignError as exc:
        report.write_trace_csv(args.out, exc.trace)
        if not args.no_plot:
            report.render_trace_figure(
                args.out.with_suffix(".png"), exc.trace, None, config.total_load
            )
        sys.stdout.write(f"no feasible design in {len(exc.trace)} evaluations\n")
        return EXIT_INFEASIBLE
    report.write_trace_csv(args.out, trace)
    if not args.no_plot:
        report.render_trace_figure(
            args.out.with_suffix(".png"), trace, best, config.total_load
        )
    sys.stdout.write(report.best_result_report(best))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "analyze":
            return _cmd_analyze(args)
        driver = run if args.command == "optimize" else random_search
        return _cmd_search(args, driver)
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except BoundsError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
