# cli/commands.py
"""Command-line entry point: check-kernel, regress, optimize and sobol-dump.

Exit status: 0 on success, 1 when a kernel property fails or an experiment errors,
2 for usage and configuration errors.
"""

import argparse
import json
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from config.experiment_config import (
    ArcParamsConfig,
    BoExperimentConfig,
    KernelCheckConfig,
    RegressionExperimentConfig,
    SobolDumpConfig,
    load_config,
)
from config.logging_config import LoggerFactory, get_module_logger
from core.bench.bo_experiment import BO_OUTPUTS, run_bo_experiment, write_bo_results
from core.bench.regression_experiment import (
    CSV_FLOAT_FORMAT,
    REGRESSION_OUTPUTS,
    run_regression_experiment,
    write_regression_results,
)
from core.bench.run_events import RunContext
from core.bench.synthetic_objective import SyntheticObjective
from core.kernels.arc_kernel import ArcParams
from core.kernels.property_checks import KernelPropertySuite, all_passed
from core.optimization.sobol_grid import sobol_grid
from core.space.parameter_space import ParameterSpace
from utils.error_handling import ConditionalBOError

# Create a logger for this module
logger = get_module_logger("cli")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

KERNEL_REPORT = "kernel_report.json"
SOBOL_DUMP = "sobol.csv"

# Errors raised while reading configs or building objects from them
_CONFIG_ERRORS = (ConditionalBOError, ValidationError, ValueError, OSError)


class UsageError(ConditionalBOError):
    """Exception raised for invalid command-line usage (e.g. existing outputs without --force)."""
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conditional-bo",
        description="Arc-kernel Gaussian processes and Bayesian optimization over conditional spaces.",
    )
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Override LOG_LEVEL for this invocation",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    commands = {
        "check-kernel": "Run the kernel invariant suite and report PASS/FAIL per property",
        "regress": "Cross-validated NMSE comparison of the regression models",
        "optimize": "Repeated optimization runs of the configured arms",
        "sobol-dump": "Write the first points of a Sobol grid",
    }
    for name, help_text in commands.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", metavar="PATH", help="JSON config (defaults apply when omitted)")
        sub.add_argument("--out", metavar="DIR", default=".", help="Output directory, created if absent")
        sub.add_argument("--seed", type=int, help="Seed override")
        sub.add_argument("--force", action="store_true", help="Overwrite existing result files")
    return parser


def _prepare_out(out_dir: str, outputs: Sequence[str], force: bool) -> None:
    existing = [name for name in outputs if os.path.exists(os.path.join(out_dir, name))]
    if existing and not force:
        raise UsageError(f"Refusing to overwrite {', '.join(existing)} in {out_dir}; pass --force")
    os.makedirs(out_dir, exist_ok=True)


def _kernel_setup(cfg: KernelCheckConfig) -> KernelPropertySuite:
    if cfg.space is not None:
        space = ParameterSpace.from_dict(cfg.space.model_dump())
    else:
        space = SyntheticObjective.from_json().space
    settings = cfg.params or ArcParamsConfig()
    params = ArcParams(
        omega=settings.omega if settings.omega is not None else np.ones(space.n_dims),
        rho=settings.rho if settings.rho is not None else np.full(space.n_dims, 0.5),
        amplitude=settings.amplitude,
        base=settings.base,
        alpha=settings.alpha,
        embedding=settings.embedding,
    )
    if params.n_dims != space.n_dims:
        raise ValueError(f"Params cover {params.n_dims} dimensions, the space has {space.n_dims}")
    return KernelPropertySuite(
        space,
        seed=cfg.seed,
        n_param_draws=cfg.n_param_draws,
        n_points=cfg.n_points,
        n_gram_draws=cfg.n_gram_draws,
        gram_size=cfg.gram_size,
        embeddings=cfg.embeddings,
        params=params,
    )


def check_kernel(args: argparse.Namespace) -> int:
    overrides = {"seed": args.seed} if args.seed is not None else None
    try:
        cfg = load_config(args.config, KernelCheckConfig, overrides)
        suite = _kernel_setup(cfg)
        _prepare_out(args.out, [KERNEL_REPORT], args.force)
    except _CONFIG_ERRORS as e:
        logger.error(f"check-kernel: {e}")
        return EXIT_USAGE

    results = suite.run()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    passed = all_passed(results)

    report = {
        "passed": bool(passed),
        "seed": cfg.seed,
        "n_dims": suite.space.n_dims,
        "properties": [{**r.to_dict(), "passed": bool(r.passed), "worst": float(r.worst)} for r in results],
    }
    with open(os.path.join(args.out, KERNEL_REPORT), "w") as f:
        json.dump(report, f, indent=2)
    return EXIT_OK if passed else EXIT_FAILURE


def _print_table(frame: pd.DataFrame) -> None:
    print(frame.to_string(index=False, float_format=lambda v: f"{v:.4f}"))


def regress(args: argparse.Namespace) -> int:
    overrides = {"seeds": [args.seed]} if args.seed is not None else None
    try:
        cfg = load_config(args.config, RegressionExperimentConfig, overrides)
        _prepare_out(args.out, REGRESSION_OUTPUTS, args.force)
    except _CONFIG_ERRORS as e:
        logger.error(f"regress: {e}")
        return EXIT_USAGE

    results = run_regression_experiment(cfg, context=RunContext("regress"))
    write_regression_results(results, args.out)
    _print_table(results.summary)
    return EXIT_OK


def optimize(args: argparse.Namespace) -> int:
    overrides = {"seeds": [args.seed]} if args.seed is not None else None
    try:
        cfg = load_config(args.config, BoExperimentConfig, overrides)
        _prepare_out(args.out, BO_OUTPUTS, args.force)
    except _CONFIG_ERRORS as e:
        logger.error(f"optimize: {e}")
        return EXIT_USAGE

    results = run_bo_experiment(cfg, context=RunContext("optimize"))
    write_bo_results(results, args.out)
    _print_table(results.summary)
    return EXIT_OK


def sobol_dump(args: argparse.Namespace) -> int:
    overrides = {"scramble_seed": args.seed} if args.seed is not None else None
    try:
        cfg = load_config(args.config, SobolDumpConfig, overrides)
        _prepare_out(args.out, [SOBOL_DUMP], args.force)
        grid = sobol_grid(cfg.dimension, cfg.count, cfg.scramble_seed)
    except _CONFIG_ERRORS as e:
        logger.error(f"sobol-dump: {e}")
        return EXIT_USAGE

    frame = pd.DataFrame(grid, columns=[f"u{i}" for i in range(cfg.dimension)])
    path = os.path.join(args.out, SOBOL_DUMP)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    print(f"Wrote {cfg.count} points in {cfg.dimension} dimensions to {path}")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "check-kernel": check_kernel,
    "regress": regress,
    "optimize": optimize,
    "sobol-dump": sobol_dump,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and return its exit status."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    if args.log_level:
        LoggerFactory.set_level(args.log_level)

    command = COMMANDS[args.command]
    try:
        return command(args)
    except Exception as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        return EXIT_FAILURE


def run() -> None:
    sys.exit(main())
