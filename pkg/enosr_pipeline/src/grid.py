"""
Grid module for the ENO-SR pipeline.
Builds, refines, generates and characterizes sigma quasi-uniform grids.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view

from exceptions import (
    DataFileError,
    InvalidSigmaError,
    NonMonotonicNodesError,
    TooFewNodesError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Grid:
    """
    Strictly increasing node sequence x_0 < ... < x_N.

    Spacing statistics are always derived from the nodes, never stored.
    """

    nodes: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise TooFewNodesError(
                f"A grid needs at least 2 nodes, got {nodes.size}"
            )
        if not np.all(np.isfinite(nodes)):
            raise NonMonotonicNodesError("Grid nodes must be finite")
        spacings = np.diff(nodes)
        if np.any(spacings <= 0):
            bad = int(np.argmax(spacings <= 0))
            raise NonMonotonicNodesError(
                f"Nodes must be strictly increasing: x[{bad}]={nodes[bad]} "
                f">= x[{bad + 1}]={nodes[bad + 1]}"
            )
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def n_intervals(self) -> int:
        return int(self.nodes.size - 1)

    @property
    def spacings(self) -> np.ndarray:
        """h[k] = x_{k+1} - x_k for k = 0..N-1."""
        return np.diff(self.nodes)

    @property
    def h_min(self) -> float:
        return float(self.spacings.min())

    @property
    def h_max(self) -> float:
        return float(self.spacings.max())

    @property
    def sigma(self) -> float:
        return self.h_max / self.h_min

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.nodes[0]), float(self.nodes[-1])

    def __len__(self) -> int:
        return int(self.nodes.size)


def build_grid(nodes: Sequence[float] | np.ndarray) -> Grid:
    """Validate a node sequence and wrap it as a Grid."""
    return Grid(np.asarray(nodes, dtype=float))


def refine_dyadic(grid: Grid) -> Grid:
    """
    Insert the midpoint of every interval.

    Even-indexed nodes of the result are the input nodes, odd-indexed nodes
    are midpoints, so h_max halves and sigma is preserved.
    """
    nodes = grid.nodes
    refined = np.empty(2 * nodes.size - 1)
    refined[0::2] = nodes
    refined[1::2] = 0.5 * (nodes[:-1] + nodes[1:])
    return Grid(refined)


def refine_levels(grid: Grid, levels: int) -> list[Grid]:
    """Return [X^0, X^1, ..., X^{levels-1}] with X^0 = grid."""
    grids = [grid]
    for _ in range(levels - 1):
        grids.append(refine_dyadic(grids[-1]))
    return grids


def generate_quasi_uniform(
    n_intervals: int,
    domain: tuple[float, float] = (-1.0, 1.0),
    sigma_target: float = 1.4,
    seed: int = 7,
) -> Grid:
    """
    Reproducible sigma quasi-uniform grid with endpoints exactly on domain.

    Spacing factors are drawn from a seeded generator in [1, sigma_target]
    and rescaled to the domain length; the ratio of any two spacings is the
    ratio of their factors.

    Args:
        n_intervals: Number of intervals N (N + 1 nodes)
        domain: Closed interval [a, b]
        sigma_target: Upper bound for h_max / h_min, at least 1
        seed: Seed for numpy's default generator

    Returns:
        Grid with sigma <= sigma_target
    """
    if sigma_target < 1:
        raise InvalidSigmaError(f"sigma_target must be >= 1, got {sigma_target}")
    if n_intervals < 1:
        raise TooFewNodesError(f"n_intervals must be >= 1, got {n_intervals}")
    a, b = float(domain[0]), float(domain[1])
    if not a < b:
        raise NonMonotonicNodesError(f"Empty domain [{a}, {b}]")

    if n_intervals == 1:
        return Grid(np.array([a, b]))
    if sigma_target == 1:
        return Grid(np.linspace(a, b, n_intervals + 1))

    rng = np.random.default_rng(seed)
    # headroom keeps floating rounding of the rescaled nodes under the bound
    upper = 1.0 + (sigma_target - 1.0) * (1.0 - 1e-9)
    factors = rng.uniform(1.0, upper, size=n_intervals)
    spacings = factors / factors.sum() * (b - a)
    nodes = np.empty(n_intervals + 1)
    nodes[0] = a
    nodes[1:] = a + np.cumsum(spacings)
    nodes[-1] = b

    grid = Grid(nodes)
    logger.debug(
        f"Generated grid: N={n_intervals}, sigma={grid.sigma:.4f}, "
        f"h_max={grid.h_max:.4e}, seed={seed}"
    )
    return grid


def is_n_local_sigma(grid: Grid, n: int, sigma: float) -> bool:
    """True iff every window of n consecutive spacings has max/min <= sigma."""
    if n < 1:
        raise ValueError(f"Window length must be >= 1, got {n}")
    spacings = grid.spacings
    windows = sliding_window_view(spacings, min(n, spacings.size))
    ratios = windows.max(axis=1) / windows.min(axis=1)
    return bool(np.all(ratios <= sigma))


def interval_containing(grid: Grid, x: float) -> int:
    """Index j of the interval [x_j, x_{j+1}] containing x (last one closed)."""
    a, b = grid.domain
    if not a <= x <= b:
        raise ValueError(f"x={x} outside grid domain [{a}, {b}]")
    j = int(np.searchsorted(grid.nodes, x, side="right")) - 1
    return min(j, grid.n_intervals - 1)


def read_grid_csv(path: str | Path) -> Grid:
    """Read a grid file with a single `x` column."""
    try:
        df = pd.read_csv(path, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataFileError(f"Failed to read grid file {path}: {e}") from e

    if "x" not in df.columns:
        raise DataFileError(f"Grid file {path} has no 'x' column: {list(df.columns)}")
    try:
        nodes = df["x"].to_numpy(dtype=float)
    except ValueError as e:
        raise DataFileError(f"Non-numeric node in {path}: {e}") from e

    logger.info(f"Loaded {nodes.size} nodes from {path}")
    return build_grid(nodes)


def write_grid_csv(grid: Grid, path: str | Path) -> None:
    pd.DataFrame({"x": grid.nodes}).to_csv(path, index=False)
    logger.info(f"Saved grid with {len(grid)} nodes to {path}")
