"""
Corner detection for the ENO-SR pipeline.

Labels every interval G (smooth) or B (may contain a corner) from the
magnitudes of second-order divided differences, checks the structure of the
B-runs, and exposes the critical spacing and adjacency diagnostics.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from exceptions import IntervalIndexError, NonpositiveSupError, TooFewNodesError
from grid import Grid
from polynomial import Samples, second_divided_differences

logger = logging.getLogger(__name__)

GOOD = "G"
BAD = "B"


@dataclass(frozen=True)
class LabelSequence:
    """Per-interval labels I_0..I_{N-1}, stored as a G/B string."""

    labels: str

    def __post_init__(self) -> None:
        invalid = set(self.labels) - {GOOD, BAD}
        if invalid:
            raise ValueError(f"Labels must be G or B, got {sorted(invalid)}")

    @classmethod
    def from_string(cls, labels: str) -> "LabelSequence":
        return cls(labels.strip().upper())

    @classmethod
    def from_mask(cls, bad: np.ndarray) -> "LabelSequence":
        return cls("".join(BAD if b else GOOD for b in bad))

    def __str__(self) -> str:
        return self.labels

    def __len__(self) -> int:
        return len(self.labels)

    def is_bad(self, i: int) -> bool:
        return self.labels[i] == BAD

    @property
    def count_bad(self) -> int:
        return self.labels.count(BAD)

    @property
    def b_runs(self) -> list[tuple[int, int]]:
        """Maximal consecutive-B runs as (start, length)."""
        runs = []
        i = 0
        n = len(self.labels)
        while i < n:
            if self.labels[i] == BAD:
                start = i
                while i < n and self.labels[i] == BAD:
                    i += 1
                runs.append((start, i - start))
            else:
                i += 1
        return runs

    def relabeled_good(self, intervals: list[int]) -> "LabelSequence":
        chars = list(self.labels)
        for i in intervals:
            chars[i] = GOOD
        return LabelSequence("".join(chars))


@dataclass(frozen=True, eq=False)
class SecondDifferences:
    """d[i] = f[x_i, x_{i+1}, x_{i+2}] for i = 0..N-2."""

    d: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return int(self.d.size)


@dataclass(frozen=True)
class BRunViolation:
    """One departure from the expected B-run structure."""

    kind: str  # "run_length" or "gap"
    start: int
    length: int

    def __str__(self) -> str:
        if self.kind == "run_length":
            return f"B-run at interval {self.start} has length {self.length} > 2"
        return f"G-gap at interval {self.start} has length {self.length}"


def second_differences(samples: Samples) -> SecondDifferences:
    if len(samples.grid) < 3:
        raise TooFewNodesError(
            f"Second differences need at least 3 nodes, got {len(samples.grid)}"
        )
    d = second_divided_differences(samples.nodes, samples.values)
    d.setflags(write=False)
    return SecondDifferences(d)


def label_intervals(samples: Samples, m: int) -> LabelSequence:
    """
    Mark suspicious intervals B using two rules on |D_k| = |f[x_k..x_{k+2}]|.

    Rule 1: if |D_{i-1}| > |D_{i-1+-n}| for n = 1..m, label I_{i-1} and I_i.
    Rule 2: if |D_i| > |D_{i+n}| and |D_{i-1}| > |D_{i-1-n}| for n = 1..m-1,
    label I_i.

    All comparisons are strict. A rule only fires when every difference it
    references exists, so intervals near the boundary stay G.

    Args:
        samples: Point values on the grid
        m: Target order (stencil size), at least 2

    Returns:
        LabelSequence over the N intervals
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    n_intervals = samples.n_intervals
    absd = np.abs(second_differences(samples).d)
    last = absd.size - 1  # D indices run 0..N-2
    bad = np.zeros(n_intervals, dtype=bool)

    # rule 1, centered on k = i - 1
    for k in range(m, last - m + 1):
        neighbours = np.concatenate((absd[k - m : k], absd[k + 1 : k + m + 1]))
        if np.all(absd[k] > neighbours):
            bad[k] = True
            bad[k + 1] = True

    # rule 2
    for i in range(m, last - m + 2):
        right = absd[i + 1 : i + m]
        left = absd[i - m : i - 1]
        if np.all(absd[i] > right) and np.all(absd[i - 1] > left):
            bad[i] = True

    labels = LabelSequence.from_mask(bad)
    logger.debug(f"Labels (m={m}): {labels} ({labels.count_bad} B)")
    return labels


def validate_b_runs(labels: LabelSequence, m: int) -> list[BRunViolation]:
    """
    Check that B-runs have length <= 2 and are separated by >= m-1 G intervals.

    An empty report means the structure is consistent.
    """
    report = []
    runs = labels.b_runs
    for start, length in runs:
        if length > 2:
            report.append(BRunViolation("run_length", start, length))
    for (start, length), (next_start, _) in zip(runs, runs[1:], strict=False):
        gap = next_start - (start + length)
        if gap < m - 1:
            report.append(BRunViolation("gap", start + length, gap))
    return report


def critical_spacing(jump_f1: float, sup_f2: float) -> float:
    """h_c = |[f']| / (4 sup|f''|); below it the corner interval is marked B."""
    if sup_f2 <= 0:
        raise NonpositiveSupError(f"sup|f''| must be positive, got {sup_f2}")
    return abs(jump_f1) / (4.0 * sup_f2)


def adjacency_condition(grid: Grid, j: int, mu: float) -> bool:
    """
    Whether a neighbour of the corner interval I_j is also expected to be B.

    With h_j = x_j - x_{j-1}:
        (x_{j+1} - mu) / (h_j + h_{j+1}) - (mu - x_j) / (h_{j+1} + h_{j+2}) > 1/4
    or the mirrored difference exceeds 1/4.
    """
    x = grid.nodes
    if j < 1 or j + 2 > grid.n_intervals:
        raise IntervalIndexError(
            f"Interval {j} needs neighbours on both sides "
            f"(valid 1..{grid.n_intervals - 2})"
        )
    if not x[j] <= mu <= x[j + 1]:
        raise ValueError(f"mu={mu} not in [{x[j]}, {x[j + 1]}]")

    h = grid.spacings  # h[k] = x_{k+1} - x_k, so the h_j above is h[j-1]
    left = (x[j + 1] - mu) / (h[j - 1] + h[j])
    right = (mu - x[j]) / (h[j] + h[j + 1])
    return bool(left - right > 0.25 or right - left > 0.25)
