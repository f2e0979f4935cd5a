"""
CSV input/output for samples and evaluation points.

Floats are written with shortest round-trip formatting and parsed with
pandas' round_trip float parser, so write-then-read is bit-exact.
"""

import logging
import sys
from pathlib import Path
from typing import IO

import numpy as np
import pandas as pd

from exceptions import DataFileError
from grid import build_grid
from polynomial import Samples

logger = logging.getLogger(__name__)


def _read_columns(path: str | Path, columns: list[str]) -> pd.DataFrame:
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataFileError(f"Failed to read {path}: {e}") from e

    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise DataFileError(
            f"{path} is missing column(s) {missing}; found {list(df.columns)}"
        )
    df = df[columns]
    if df.isna().any().any():
        raise DataFileError(f"{path} has empty cells")
    try:
        df = df.astype(float)
    except ValueError as e:
        raise DataFileError(f"Non-numeric value in {path}: {e}") from e
    if not np.isfinite(df.to_numpy()).all():
        raise DataFileError(f"{path} has non-finite values")
    return df


def read_samples_csv(path: str | Path) -> Samples:
    """Read an `x,f` file; x must be strictly increasing."""
    df = _read_columns(path, ["x", "f"])
    grid = build_grid(df["x"].to_numpy())
    logger.info(f"Loaded {len(grid)} samples from {path}")
    return Samples(grid, df["f"].to_numpy())


def write_samples_csv(samples: Samples, path: str | Path) -> None:
    pd.DataFrame({"x": samples.nodes, "f": samples.values}).to_csv(path, index=False)
    logger.info(f"Saved {len(samples.grid)} samples to {path}")


def read_points_csv(path: str | Path) -> np.ndarray:
    """Read evaluation abscissae from an `x` column."""
    return _read_columns(path, ["x"])["x"].to_numpy()


def write_xy_csv(x: np.ndarray, y: np.ndarray, path: str | Path | None = None) -> None:
    """Write `x,y` rows to path, or to stdout when path is None."""
    target: str | Path | IO[str] = sys.stdout if path is None else path
    pd.DataFrame({"x": x, "y": y}).to_csv(target, index=False)
    if path is not None:
        logger.info(f"Saved {len(x)} evaluated points to {path}")
