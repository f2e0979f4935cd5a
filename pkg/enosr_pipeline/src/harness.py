"""
Convergence studies for the ENO-SR pipeline.

Refines a base grid dyadically, builds an interpolant per level, measures
the corner location error e_k and the sup interpolation error E_k, and turns
consecutive errors into observed orders.
"""

import logging
import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.linear_model import LinearRegression as reg

from corner_functions import CornerFunction, f_d
from enosr import EnosrInterpolant, Mode, build_interpolant, locate_corner
from exceptions import NonpositiveErrorValueError
from grid import Grid, refine_levels
from polynomial import eval_newton, sample

logger = logging.getLogger(__name__)

STUDY_COLUMNS = ["d", "k", "h_max", "e_k", "p_k", "E_k", "P_k"]
DEFAULT_PROBES = 64


@dataclass(frozen=True)
class ConvergenceRow:
    level: int
    h_max: float
    e: float | None
    p: float | None
    E: float
    P: float | None
    psi: float | None = None
    n_splits: int = 0


def sup_error(
    f: CornerFunction,
    interpolant: EnosrInterpolant,
    probes_per_interval: int = DEFAULT_PROBES,
) -> float:
    """
    max |f - I f| over equispaced probes of every piece, ends included.

    Each piece is probed with its own polynomial on its closed interval, so
    both sides of a split point are measured.
    """
    if probes_per_interval < 2:
        raise ValueError(f"probes_per_interval must be >= 2, got {probes_per_interval}")
    t = np.linspace(0.0, 1.0, probes_per_interval)
    worst = 0.0
    for piece in interpolant.pieces:
        xs = piece.lo + (piece.hi - piece.lo) * t
        xs[-1] = piece.hi
        err = np.max(np.abs(f(xs) - eval_newton(piece.poly, xs)))
        worst = max(worst, float(err))
    return worst


def order_sequence(errors: Sequence[float]) -> list[float]:
    """p_k = log2(e_{k-1} / e_k) for k >= 1."""
    values = np.asarray(errors, dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise NonpositiveErrorValueError(f"Errors must be positive and finite: {list(errors)}")
    return [float(v) for v in np.log2(values[:-1] / values[1:])]


def _pairwise_orders(errors: Sequence[float | None]) -> list[float | None]:
    orders: list[float | None] = [None]
    for prev, cur in zip(errors[:-1], errors[1:], strict=True):
        if prev is None or cur is None or prev <= 0 or cur <= 0:
            orders.append(None)
        else:
            orders.append(order_sequence([prev, cur])[0])
    return orders


def fitted_order(values: Sequence[float | None], last: int = 3) -> float | None:
    """
    Observed order from a least-squares fit of log2(value) against level.

    Uses the last `last` levels; returns None if any of them is missing.
    """
    tail = list(values)[-last:]
    if len(tail) < 2 or any(v is None or v <= 0 for v in tail):
        return None
    levels = np.arange(len(tail), dtype=float).reshape(-1, 1)
    log_values = np.log2(np.asarray(tail, dtype=float))
    lin_reg = reg()
    lin_reg.fit(levels, log_values)
    return float(-lin_reg.coef_[0])


def _study_cell(
    f: CornerFunction,
    grid: Grid,
    m: int,
    mode: Mode,
    probes_per_interval: int,
) -> dict:
    samples = sample(f.evaluate, grid)
    interpolant = build_interpolant(samples, m, mode)
    psi = locate_corner(interpolant) if mode is Mode.ENOSR else None
    e = abs(f.mu - psi) if psi is not None and f.mu is not None else None
    return {
        "h_max": grid.h_max,
        "psi": psi,
        "e": e,
        "E": sup_error(f, interpolant, probes_per_interval),
        "n_splits": len(interpolant.splits),
    }


def convergence_study(
    f: CornerFunction,
    base_grid: Grid,
    levels: int,
    m: int,
    mode: "str | Mode" = Mode.ENOSR,
    probes_per_interval: int = DEFAULT_PROBES,
    n_jobs: int = 1,
) -> list[ConvergenceRow]:
    """
    Run one function through `levels` dyadic refinements of base_grid.

    Args:
        f: Function to sample
        base_grid: Level-0 grid; must contain f.mu strictly inside
        levels: Number of grids (level 0 included)
        m: Stencil size
        mode: Interpolation mode
        probes_per_interval: Probe count per piece for E_k
        n_jobs: joblib workers; levels are independent cells

    Returns:
        One ConvergenceRow per level, in level order
    """
    mode = Mode.parse(mode)
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")
    a, b = base_grid.domain
    if f.mu is not None and not a < f.mu < b:
        raise ValueError(f"Corner mu={f.mu} not strictly inside [{a}, {b}]")

    grids = refine_levels(base_grid, levels)
    logger.info(f"Convergence study for {f.name}: {levels} levels, m={m}, mode={mode.value}")
    if f.expected_order(m) < m:
        logger.warning(
            f"{f.name} has {f.smoothness:g} bounded derivatives off mu; "
            f"E_k order is capped at {f.expected_order(m):g}, not {m}"
        )
    try:
        cells = Parallel(n_jobs=n_jobs)(
            delayed(_study_cell)(f, grid, m, mode, probes_per_interval)
            for grid in grids
        )
    except Exception as e:
        logger.error(f"Convergence study for {f.name} failed: {e}")
        raise

    e_values = [cell["e"] for cell in cells]
    E_values = [cell["E"] for cell in cells]
    p_values = _pairwise_orders(e_values)
    P_values = _pairwise_orders(E_values)

    rows = []
    for k, cell in enumerate(cells):
        row = ConvergenceRow(
            level=k,
            h_max=cell["h_max"],
            e=cell["e"],
            p=p_values[k],
            E=cell["E"],
            P=P_values[k],
            psi=cell["psi"],
            n_splits=cell["n_splits"],
        )
        logger.info(
            f"  {f.name} k={k}: h_max={row.h_max:.4e} "
            f"e={'-' if row.e is None else f'{row.e:.4e}'} E={row.E:.4e} "
            f"splits={row.n_splits}"
        )
        rows.append(row)
    return rows


def study_to_frame(rows: Sequence[ConvergenceRow], d: float) -> pd.DataFrame:
    records = [
        {
            "d": d,
            "k": row.level,
            "h_max": row.h_max,
            "e_k": row.e,
            "p_k": row.p,
            "E_k": row.E,
            "P_k": row.P,
        }
        for row in rows
    ]
    frame = pd.DataFrame.from_records(records, columns=STUDY_COLUMNS)
    return frame.astype({"d": float, "k": int, "h_max": float, "e_k": float,
                         "p_k": float, "E_k": float, "P_k": float})


def run_studies(
    d_values: Sequence[float],
    base_grid: Grid,
    levels: int,
    m: int,
    mode: "str | Mode" = Mode.ENOSR,
    probes_per_interval: int = DEFAULT_PROBES,
    n_jobs: int = 1,
) -> pd.DataFrame:
    """Convergence table for the f_d family over several d values."""
    frames = []
    for d in d_values:
        f = f_d(d)
        logger.info(f"d={d:g}: h_c = |[f']| / (4 * {f.sup_f2:g}) = {f.critical_spacing():.4e}")
        rows = convergence_study(f, base_grid, levels, m, mode, probes_per_interval, n_jobs)
        frames.append(study_to_frame(rows, d))
    return pd.concat(frames, ignore_index=True)


def write_study_csv(frame: pd.DataFrame, path: str | Path | None = None) -> None:
    """Write the study table; undefined cells are blank."""
    target: str | Path | IO[str] = sys.stdout if path is None else path
    frame.to_csv(target, index=False, na_rep="", columns=STUDY_COLUMNS)
    if path is not None:
        logger.info(f"Saved convergence table ({len(frame)} rows) to {path}")


def study_summary(frame: pd.DataFrame, last: int = 3) -> pd.DataFrame:
    """Fitted detection and interpolation orders per d over the last levels."""
    records = []
    for d, group in frame.groupby("d", sort=False):
        group = group.sort_values("k")
        e = [None if math.isnan(v) else float(v) for v in group["e_k"]]
        records.append(
            {
                "d": d,
                "detection_order": fitted_order(e, last),
                "interpolation_order": fitted_order(group["E_k"].tolist(), last),
            }
        )
    return pd.DataFrame.from_records(records)
