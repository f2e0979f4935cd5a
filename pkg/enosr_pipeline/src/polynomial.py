"""
Newton-form interpolation on arbitrary stencils.

Divided differences (general order and the closed-form second order used by
the corner detector), Newton polynomials with Horner evaluation, and the
intersection primitive used by subcell resolution.
"""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from exceptions import StencilOutOfRangeError
from grid import Grid

logger = logging.getLogger(__name__)

N_PROBE = 64
ZERO_TOLERANCE = 1e-13
BISECTION_RELATIVE_WIDTH = 2.0**-48


@dataclass(frozen=True, eq=False)
class Samples:
    """A grid paired with one function value per node."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise ValueError(
                f"Got {values.size} values for {len(self.grid)} grid nodes"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("Sample values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def n_intervals(self) -> int:
        return self.grid.n_intervals

    def scaled(self, factor: float) -> "Samples":
        return Samples(self.grid, self.values * factor)


def sample(func: Callable[[np.ndarray], np.ndarray], grid: Grid) -> Samples:
    """Evaluate a vectorized callable at every grid node."""
    return Samples(grid, np.asarray(func(grid.nodes), dtype=float))


@dataclass(frozen=True, eq=False)
class NewtonPoly:
    """
    Interpolating polynomial in Newton form.

    coeffs[k] = f[x_0, ..., x_k] over stencil_nodes in the given order.
    """

    stencil_nodes: np.ndarray
    coeffs: np.ndarray
    stencil: tuple[int, ...] = ()

    @property
    def degree(self) -> int:
        """Upper bound on the degree (m - 1 for m stencil nodes)."""
        return int(self.coeffs.size - 1)

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        return eval_newton(self, x)

    def derivative_at(self, x: float | np.ndarray) -> float | np.ndarray:
        """First derivative via Horner's scheme on the Newton form."""
        x_data = self.stencil_nodes
        n = self.coeffs.size - 1
        y = self.coeffs[n] + 0.0 * np.asarray(x, dtype=float)
        yp = 0.0 * y
        for j in range(n - 1, -1, -1):
            yp = y + (x - x_data[j]) * yp
            y = self.coeffs[j] + (x - x_data[j]) * y
        return yp if np.ndim(yp) else float(yp)


def newton_coefficients(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Divided-difference coefficients f[x_0], f[x_0,x_1], ..., f[x_0..x_{n-1}].

    In-place column sweep of the divided-difference table.
    """
    coef = np.array(y, dtype=float)
    x = np.asarray(x, dtype=float)
    for j in range(1, coef.size):
        coef[j:] = (coef[j:] - coef[j - 1 : -1]) / (x[j:] - x[:-j])
    return coef


def second_divided_differences(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    """
    Closed-form f[x_i, x_{i+1}, x_{i+2}] for every i on a nonuniform grid.

    D_i = f_i / (h1 (h1 + h2)) - f_{i+1} / (h1 h2) + f_{i+2} / (h2 (h1 + h2))
    with h1 = x_{i+1} - x_i and h2 = x_{i+2} - x_{i+1}.
    """
    h = np.diff(x)
    h1, h2 = h[:-1], h[1:]
    return (
        f[:-2] / (h1 * (h1 + h2))
        - f[1:-1] / (h1 * h2)
        + f[2:] / (h2 * (h1 + h2))
    )


def _check_stencil(samples: Samples, start: int, order: int) -> None:
    if start < 0 or order < 0 or start + order > samples.n_intervals:
        raise StencilOutOfRangeError(
            f"Stencil [{start}, {start + order}] outside nodes "
            f"[0, {samples.n_intervals}]"
        )


def divided_difference(samples: Samples, start: int, order: int) -> float:
    """f[x_start, ..., x_{start+order}]."""
    _check_stencil(samples, start, order)
    x = samples.nodes[start : start + order + 1]
    f = samples.values[start : start + order + 1]
    if order == 2:
        return float(second_divided_differences(x, f)[0])
    return float(newton_coefficients(x, f)[-1])


def divided_difference_table(samples: Samples, max_order: int) -> list[np.ndarray]:
    """
    table[k][i] = f[x_i, ..., x_{i+k}] for k = 0..max_order.

    ENO selection looks candidate stencils up here instead of refitting.
    """
    if max_order > samples.n_intervals:
        raise StencilOutOfRangeError(
            f"Order {max_order} needs {max_order + 1} nodes, "
            f"grid has {len(samples.grid)}"
        )
    x = samples.nodes
    table = [samples.values.copy()]
    for k in range(1, max_order + 1):
        prev = table[-1]
        table.append((prev[1:] - prev[:-1]) / (x[k:] - x[:-k]))
    return table


def fit_newton(samples: Samples, stencil: Sequence[int] | range) -> NewtonPoly:
    """Unique polynomial of degree <= m-1 matching the samples on the stencil."""
    indices = np.asarray(list(stencil), dtype=int)
    if indices.size == 0:
        raise StencilOutOfRangeError("Empty stencil")
    if indices.min() < 0 or indices.max() > samples.n_intervals:
        raise StencilOutOfRangeError(
            f"Stencil {indices.tolist()} outside nodes [0, {samples.n_intervals}]"
        )
    if np.unique(indices).size != indices.size:
        raise StencilOutOfRangeError(f"Repeated node in stencil {indices.tolist()}")

    x = samples.nodes[indices]
    coeffs = newton_coefficients(x, samples.values[indices])
    x.setflags(write=False)
    coeffs.setflags(write=False)
    return NewtonPoly(x, coeffs, tuple(int(i) for i in indices))


def eval_newton(poly: NewtonPoly, x: float | np.ndarray) -> float | np.ndarray:
    """Nested (Horner) evaluation of the Newton form; extrapolation allowed."""
    x_data = poly.stencil_nodes
    coeffs = poly.coeffs
    n = coeffs.size - 1
    y = coeffs[n] + 0.0 * np.asarray(x, dtype=float)
    for j in range(n - 1, -1, -1):
        y = coeffs[j] + (x - x_data[j]) * y
    return y if np.ndim(y) else float(y)


def intersect_on_interval(
    p_left: NewtonPoly,
    p_right: NewtonPoly,
    interval: tuple[float, float],
    n_probe: int = N_PROBE,
) -> float | None:
    """
    Unique crossing of two polynomials inside [a, b], if there is one.

    q = p_right - p_left is probed at n_probe points spanning [a, b]. Values
    with |q| <= ZERO_TOLERANCE * max|q| count as zero. Exactly one sign change
    is required; the bracketing probe subinterval is then bisected. Zero or
    several sign changes give None.
    """
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError(f"Empty interval [{a}, {b}]")

    def q(x: float) -> float:
        return float(eval_newton(p_right, x) - eval_newton(p_left, x))

    probes = np.linspace(a, b, n_probe)
    values = np.asarray(eval_newton(p_right, probes) - eval_newton(p_left, probes))
    scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    signs = np.sign(values)
    signs[np.abs(values) <= ZERO_TOLERANCE * scale] = 0

    nonzero = np.flatnonzero(signs)
    if nonzero.size < 2:
        return None
    changes = np.flatnonzero(signs[nonzero[1:]] != signs[nonzero[:-1]])
    if changes.size != 1:
        return None

    lo = int(nonzero[changes[0]])
    hi = int(nonzero[changes[0] + 1])
    if hi - lo == 1:
        psi = bisect(
            q,
            probes[lo],
            probes[hi],
            xtol=BISECTION_RELATIVE_WIDTH * (b - a),
            maxiter=200,
        )
    elif hi - lo == 2:
        # the single probe between the signs is an exact zero
        psi = probes[lo + 1]
    else:
        return None

    psi = float(psi)
    if not a < psi < b:
        return None
    return psi
