"""
Test functions with an isolated corner singularity.
"""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from detection import critical_spacing
from grid import Grid


@dataclass(frozen=True, eq=False)
class CornerFunction:
    """
    Continuous function whose first derivative jumps at mu.

    jump is f'(mu+) - f'(mu-); sup_f2 is a caller-supplied bound on |f''|
    away from mu; smoothness is the highest derivative order bounded off mu.
    """

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    mu: float | None
    jump: float
    sup_f2: float
    smoothness: float = math.inf

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        y = self.evaluate(np.asarray(x, dtype=float))
        return y if np.ndim(y) else float(y)

    def expected_order(self, m: int) -> float:
        """Interpolation order reachable with m-point stencils."""
        return min(float(m), self.smoothness)

    def critical_spacing(self) -> float:
        if self.sup_f2 == 0:
            return math.inf
        return critical_spacing(self.jump, self.sup_f2)


def f_d(d: float) -> CornerFunction:
    """
    Parametric corner family on [-1, 1] with mu = pi/8 and |[f']| = d.

    Left branch (x - mu)^2 + d (x - mu) + cos(pi x / 2), right branch
    cos(pi x / 2). sup_f2 is reported as 2 so that h_c = d / 8.
    """
    mu = math.pi / 8

    def evaluate(x: np.ndarray) -> np.ndarray:
        smooth = np.cos(np.pi * x / 2)
        return np.where(x <= mu, (x - mu) ** 2 + d * (x - mu) + smooth, smooth)

    return CornerFunction(f"fd(d={d:g})", evaluate, mu, -d, 2.0)


def abs_corner(mu: float) -> CornerFunction:
    """|x - mu|: both one-sided pieces are exact lines."""

    def evaluate(x: np.ndarray) -> np.ndarray:
        return np.abs(x - mu)

    return CornerFunction(f"abs(mu={mu:g})", evaluate, mu, 2.0, 0.0)


def ramp(mu: float, jump: float = 1.0) -> CornerFunction:
    """jump * (x - mu)_+."""

    def evaluate(x: np.ndarray) -> np.ndarray:
        return jump * np.maximum(x - mu, 0.0)

    return CornerFunction(f"ramp(mu={mu:g})", evaluate, mu, jump, 0.0)


def polynomial_function(coeffs: Sequence[float], sup_f2: float = 0.0) -> CornerFunction:
    """Smooth polynomial sum(coeffs[k] x^k) wrapped with jump 0."""
    c = np.asarray(coeffs, dtype=float)

    def evaluate(x: np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval(x, c)

    return CornerFunction(f"poly(deg={c.size - 1})", evaluate, None, 0.0, sup_f2)


def counterexample_pair(grid: Grid, j: int) -> tuple[CornerFunction, CornerFunction]:
    """
    Two functions that agree on every node yet differ by h^2/4 inside I_j.

    f_plus  = (x - x_j)(x - x_{j+1}) for x > x_j, else 0
    f_minus = (x - x_j)(x - x_{j+1}) for x > x_{j+1}, else 0
    """
    xj, xj1 = float(grid.nodes[j]), float(grid.nodes[j + 1])

    def f_plus(x: np.ndarray) -> np.ndarray:
        return np.where(x > xj, (x - xj) * (x - xj1), 0.0)

    def f_minus(x: np.ndarray) -> np.ndarray:
        return np.where(x > xj1, (x - xj) * (x - xj1), 0.0)

    h = xj1 - xj
    return (
        CornerFunction("f_plus", f_plus, xj, -h, 2.0),
        CornerFunction("f_minus", f_minus, xj1, h, 2.0),
    )
