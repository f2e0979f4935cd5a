"""
Command-line interface for the ENO-SR pipeline.

Subcommands:
    detect    label intervals of a samples file and locate the corner
    interp    evaluate an interpolant of a samples file
    converge  run the f_d convergence study and write the order table

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

import argparse
import logging
from collections.abc import Sequence
from fractions import Fraction
from typing import Any

import numpy as np

from config import DEFAULT_CONFIG, load_config, setup_logging
from enosr import Mode, build_interpolant, eval_interpolant, locate_corner
from exceptions import (
    ConfigError,
    DataFileError,
    EnosrError,
    GridError,
    InvalidSigmaError,
    OutOfDomainError,
    StencilOutOfRangeError,
)
from grid import generate_quasi_uniform
from harness import run_studies, study_summary, write_study_csv
from samples_io import read_points_csv, read_samples_csv, write_xy_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

DATA_ERRORS = (DataFileError, GridError, StencilOutOfRangeError, OutOfDomainError)
MODES = [mode.value for mode in Mode]


def _number(text: str) -> float:
    """Parse a float, accepting fractions such as 1/64."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from e


def _number_list(text: str) -> list[float]:
    return [_number(part) for part in text.split(",") if part.strip()]


def _domain(text: str) -> list[float]:
    values = _number_list(text)
    if len(values) != 2 or not values[0] < values[1]:
        raise argparse.ArgumentTypeError(f"domain must be A,B with A < B: {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run_enosr",
        description="ENO-SR interpolation with corner detection on quasi-uniform grids",
    )
    parser.add_argument("--config", type=str, help="YAML configuration file")
    parser.add_argument(
        "--log-level", type=str, help="Override logging level (DEBUG, INFO, ...)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="Label intervals and locate the corner")
    detect.add_argument("--input", required=True, help="Samples CSV with header x,f")
    detect.add_argument("--m", type=int, help="Detection order (default from config)")
    detect.add_argument("--mu", type=_number, help="Exact corner, to report e = |mu - psi|")

    interp = sub.add_parser("interp", help="Evaluate an interpolant")
    interp.add_argument("--input", required=True, help="Samples CSV with header x,f")
    interp.add_argument("--m", type=int, required=True, help="Stencil size")
    interp.add_argument("--mode", choices=MODES, required=True)
    where = interp.add_mutually_exclusive_group(required=True)
    where.add_argument("--eval-at", type=str, help="CSV with header x")
    where.add_argument("--dense", type=int, help="Number of equispaced points")
    interp.add_argument("--out", type=str, help="Output CSV (default stdout)")

    converge = sub.add_parser("converge", help="Run the f_d convergence study")
    converge.add_argument("--function", choices=["fd"], default="fd")
    converge.add_argument("--d", type=_number_list, help="Comma-separated d values")
    converge.add_argument("--m", type=int)
    converge.add_argument("--levels", type=int)
    converge.add_argument("--n0", type=int, help="Intervals of the base grid")
    converge.add_argument("--sigma", type=_number)
    converge.add_argument("--seed", type=int)
    converge.add_argument("--mode", choices=MODES)
    converge.add_argument("--domain", type=_domain, help="Base grid domain A,B")
    converge.add_argument("--probes", type=int, help="Probes per piece for E_k")
    converge.add_argument("--jobs", type=int, help="Parallel workers")
    converge.add_argument("--out", type=str, help="Output CSV (default stdout)")

    return parser


def _cmd_detect(args: argparse.Namespace, config: dict[str, Any]) -> int:
    samples = read_samples_csv(args.input)
    m = args.m if args.m is not None else config["detection"]["m"]
    interpolant = build_interpolant(samples, m, Mode.ENOSR)
    psi = locate_corner(interpolant)

    print(str(interpolant.detected_labels))
    print(f"psi={'none' if psi is None else repr(psi)}")
    if args.mu is not None:
        print(f"e={'none' if psi is None else repr(abs(args.mu - psi))}")
    return EXIT_OK


def _cmd_interp(args: argparse.Namespace, config: dict[str, Any]) -> int:
    samples = read_samples_csv(args.input)
    interpolant = build_interpolant(samples, args.m, args.mode)
    if args.eval_at is not None:
        x = read_points_csv(args.eval_at)
    else:
        if args.dense < 2:
            logger.error(f"--dense needs at least 2 points, got {args.dense}")
            return EXIT_USAGE
        a, b = samples.grid.domain
        x = np.linspace(a, b, args.dense)
    y = eval_interpolant(interpolant, x)
    write_xy_csv(x, np.atleast_1d(y), args.out)
    return EXIT_OK


def _cmd_converge(args: argparse.Namespace, config: dict[str, Any]) -> int:
    study = dict(config["study"])
    overrides = {
        "d_values": args.d,
        "m": args.m,
        "levels": args.levels,
        "n0": args.n0,
        "sigma": args.sigma,
        "seed": args.seed,
        "mode": args.mode,
        "domain": args.domain,
        "probes_per_interval": args.probes,
    }
    study.update({k: v for k, v in overrides.items() if v is not None})
    n_jobs = args.jobs if args.jobs is not None else config["performance"]["parallel_jobs"]

    base_grid = generate_quasi_uniform(
        study["n0"], tuple(study["domain"]), study["sigma"], study["seed"]
    )
    logger.info(
        f"Base grid: {len(base_grid)} nodes, sigma={base_grid.sigma:.4f}, "
        f"h_max={base_grid.h_max:.4e}"
    )
    frame = run_studies(
        [float(d) for d in study["d_values"]],
        base_grid,
        study["levels"],
        study["m"],
        study["mode"],
        study["probes_per_interval"],
        n_jobs,
    )
    write_study_csv(frame, args.out)
    for record in study_summary(frame).to_dict("records"):
        logger.info(
            f"d={record['d']:g}: fitted detection order {record['detection_order']}, "
            f"interpolation order {record['interpolation_order']}"
        )
    return EXIT_OK


COMMANDS = {"detect": _cmd_detect, "interp": _cmd_interp, "converge": _cmd_converge}


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        config = load_config(args.config)
        setup_logging(config, args.log_level)
    except ConfigError as e:
        setup_logging(DEFAULT_CONFIG)
        logger.error(str(e))
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args, config)
    except InvalidSigmaError as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except DATA_ERRORS as e:
        logger.error(f"Data error: {e}")
        return EXIT_DATA
    except (EnosrError, ValueError) as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
