"""
Interpolant construction for the ENO-SR pipeline.

Three modes share one piecewise representation:
- lagrange: fixed, centered m-point stencil per interval
- eno: data-dependent stencil grown toward smaller divided differences
- enosr: ENO on G intervals, subcell resolution on detected B-runs
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from detection import LabelSequence, label_intervals, second_differences
from exceptions import (
    InvalidModeError,
    OutOfDomainError,
    StencilOutOfRangeError,
    TooFewNodesError,
    WrongModeError,
)
from grid import Grid
from polynomial import (
    NewtonPoly,
    Samples,
    divided_difference_table,
    eval_newton,
    fit_newton,
    intersect_on_interval,
)

logger = logging.getLogger(__name__)


class Mode(str, Enum):
    LAGRANGE = "lagrange"
    ENO = "eno"
    ENOSR = "enosr"

    @classmethod
    def parse(cls, value: "str | Mode") -> "Mode":
        if isinstance(value, Mode):
            return value
        try:
            return cls(str(value).lower())
        except ValueError as e:
            raise InvalidModeError(
                f"Unknown mode {value!r}; expected one of {[m.value for m in cls]}"
            ) from e


@dataclass(frozen=True, eq=False)
class Piece:
    lo: float
    hi: float
    poly: NewtonPoly


@dataclass(frozen=True)
class Split:
    """Subcell split of one B-run at psi."""

    psi: float
    left_piece: int
    right_piece: int
    run_start: int
    run_length: int
    strength: float


@dataclass(frozen=True, eq=False)
class EnosrInterpolant:
    """
    Piecewise polynomial tiling [x_0, x_N].

    Pieces are half-open [lo, hi) except the last, which is closed.
    """

    grid: Grid
    m: int
    mode: Mode
    pieces: tuple[Piece, ...]
    splits: tuple[Split, ...] = ()
    labels: LabelSequence | None = None
    detected_labels: LabelSequence | None = None
    fallbacks: tuple[int, ...] = ()

    @property
    def breakpoints(self) -> np.ndarray:
        return np.array([p.lo for p in self.pieces] + [self.pieces[-1].hi])

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        return eval_interpolant(self, x)


def fixed_stencil(n_intervals: int, i: int, m: int) -> range:
    """m points around I_i with ceil(m/2) of them at or left of x_i."""
    m1 = math.ceil(m / 2)
    start = min(max(i - m1 + 1, 0), n_intervals + 1 - m)
    return range(start, start + m)


def eno_stencil(
    samples: Samples,
    i: int,
    m: int,
    table: list[np.ndarray] | None = None,
) -> range:
    """
    Hierarchical ENO stencil of m points containing x_i and x_{i+1}.

    Starting from {x_i, x_{i+1}}, each step adds the neighbour on the side
    whose grown stencil has the smaller |divided difference|; ties go left.
    Array bounds force extension to the only available side.
    """
    n_intervals = samples.n_intervals
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if m > n_intervals + 1:
        raise StencilOutOfRangeError(
            f"Stencil of {m} points needs more than {n_intervals + 1} nodes"
        )
    if not 0 <= i < n_intervals:
        raise StencilOutOfRangeError(f"Interval {i} outside [0, {n_intervals - 1}]")
    if table is None:
        table = divided_difference_table(samples, m - 1)

    lo, hi = i, i + 1
    for _ in range(m - 2):
        order = hi - lo + 1
        if lo == 0:
            hi += 1
        elif hi == n_intervals:
            lo -= 1
        elif abs(table[order][lo - 1]) <= abs(table[order][lo]):
            lo -= 1
        else:
            hi += 1
    return range(lo, hi + 1)


def build_interpolant(
    samples: Samples, m: int, mode: "str | Mode" = Mode.ENOSR
) -> EnosrInterpolant:
    """
    Build the piecewise interpolant of the samples.

    Args:
        samples: Point values on a grid
        m: Stencil size (polynomial degree m - 1)
        mode: lagrange, eno or enosr

    Returns:
        EnosrInterpolant with one piece per G interval and two pieces per
        split B-run
    """
    mode = Mode.parse(mode)
    n_intervals = samples.n_intervals
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if len(samples.grid) < m:
        raise TooFewNodesError(
            f"{mode.value} with m={m} needs at least {m} nodes, got {len(samples.grid)}"
        )
    if mode is Mode.ENOSR and len(samples.grid) < 2 * m + 2:
        raise TooFewNodesError(
            f"enosr with m={m} needs at least {2 * m + 2} nodes, "
            f"got {len(samples.grid)}"
        )

    nodes = samples.nodes
    if mode is Mode.LAGRANGE:
        pieces = tuple(
            Piece(
                nodes[i],
                nodes[i + 1],
                fit_newton(samples, fixed_stencil(n_intervals, i, m)),
            )
            for i in range(n_intervals)
        )
        return EnosrInterpolant(samples.grid, m, mode, pieces)

    table = divided_difference_table(samples, m - 1)

    def eno_piece(i: int) -> Piece:
        stencil = eno_stencil(samples, i, m, table)
        return Piece(nodes[i], nodes[i + 1], fit_newton(samples, stencil))

    if mode is Mode.ENO:
        pieces = tuple(eno_piece(i) for i in range(n_intervals))
        return EnosrInterpolant(samples.grid, m, mode, pieces)

    detected = label_intervals(samples, m)
    absd = np.abs(second_differences(samples).d)

    # run start -> (psi, p_minus, p_plus, length, strength)
    resolved: dict[int, tuple[float, NewtonPoly, NewtonPoly, int, float]] = {}
    fallbacks: list[int] = []
    for start, length in detected.b_runs:
        run = list(range(start, start + length))
        end = start + length  # node index of the run's right end
        if length > 2:
            logger.debug(f"B-run at {start} of length {length}: fallback to G")
            fallbacks.extend(run)
            continue
        if start - m + 1 < 0 or end + m - 1 > n_intervals:
            logger.debug(f"B-run at {start}: one-sided stencil out of range")
            fallbacks.extend(run)
            continue

        p_minus = fit_newton(samples, range(start - m + 1, start + 1))
        p_plus = fit_newton(samples, range(end, end + m))
        psi = intersect_on_interval(p_minus, p_plus, (nodes[start], nodes[end]))
        if psi is None:
            logger.debug(f"B-run at {start}: no unique intersection, fallback to G")
            fallbacks.extend(run)
            continue

        touching = absd[max(start - 1, 0) : min(end, absd.size)]
        strength = float(touching.max()) if touching.size else 0.0
        resolved[start] = (psi, p_minus, p_plus, length, strength)

    pieces_list: list[Piece] = []
    splits: list[Split] = []
    i = 0
    while i < n_intervals:
        if i in resolved:
            psi, p_minus, p_plus, length, strength = resolved[i]
            left = len(pieces_list)
            pieces_list.append(Piece(nodes[i], psi, p_minus))
            pieces_list.append(Piece(psi, nodes[i + length], p_plus))
            splits.append(Split(psi, left, left + 1, i, length, strength))
            i += length
        else:
            pieces_list.append(eno_piece(i))
            i += 1

    labels = detected.relabeled_good(fallbacks)
    logger.debug(
        f"ENO-SR: {len(splits)} split(s), {len(fallbacks)} fallback interval(s), "
        f"labels {labels}"
    )
    return EnosrInterpolant(
        samples.grid,
        m,
        mode,
        tuple(pieces_list),
        tuple(splits),
        labels,
        detected,
        tuple(fallbacks),
    )


def eval_interpolant(
    interpolant: EnosrInterpolant, x: float | np.ndarray
) -> float | np.ndarray:
    """Evaluate the piece owning x; a breakpoint belongs to the piece starting there."""
    xs = np.asarray(x, dtype=float)
    a, b = interpolant.grid.domain
    if np.any(xs < a) or np.any(xs > b) or np.any(np.isnan(xs)):
        raise OutOfDomainError(f"Evaluation point outside [{a}, {b}]")

    los = np.array([p.lo for p in interpolant.pieces])
    owner = np.searchsorted(los, xs, side="right") - 1
    owner = np.clip(owner, 0, len(interpolant.pieces) - 1)

    if xs.ndim == 0:
        return float(eval_newton(interpolant.pieces[int(owner)].poly, float(xs)))
    out = np.empty_like(xs)
    for k in np.unique(owner):
        mask = owner == k
        out[mask] = eval_newton(interpolant.pieces[int(k)].poly, xs[mask])
    return out


def corner_locations(interpolant: EnosrInterpolant) -> list[float]:
    if interpolant.mode is not Mode.ENOSR:
        raise WrongModeError(f"Corner location needs enosr mode, got {interpolant.mode.value}")
    return [s.psi for s in interpolant.splits]


def locate_corner(interpolant: EnosrInterpolant) -> float | None:
    """psi of the strongest split, or None when no B-run was resolved."""
    if interpolant.mode is not Mode.ENOSR:
        raise WrongModeError(f"Corner location needs enosr mode, got {interpolant.mode.value}")
    if not interpolant.splits:
        return None
    return max(interpolant.splits, key=lambda s: s.strength).psi
