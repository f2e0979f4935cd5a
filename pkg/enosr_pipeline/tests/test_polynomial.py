"""Tests for divided differences, Newton polynomials and intersection."""

import numpy as np
import pytest

from exceptions import StencilOutOfRangeError
from grid import build_grid, generate_quasi_uniform
from polynomial import (
    Samples,
    divided_difference,
    divided_difference_table,
    eval_newton,
    fit_newton,
    intersect_on_interval,
    newton_coefficients,
    sample,
    second_divided_differences,
)


def newton_through(x, y):
    """Polynomial through all the given points."""
    return fit_newton(Samples(build_grid(x), y), range(len(x)))


class TestDividedDifference:
    def test_constant(self):
        samples = Samples(build_grid([0, 0.3, 1]), [3, 3, 3])
        assert divided_difference(samples, 0, 2) == pytest.approx(0, abs=1e-14)

    def test_square(self):
        samples = sample(lambda x: x**2, build_grid([0, 0.5, 1.5]))
        assert divided_difference(samples, 0, 2) == pytest.approx(1.0, rel=1e-14)

    def test_ramp(self):
        samples = sample(lambda x: np.maximum(x - 0.25, 0), build_grid([0, 0.2, 0.6]))
        assert divided_difference(samples, 0, 2) == pytest.approx(1.458333333, rel=1e-8)

    def test_out_of_range(self):
        samples = Samples(build_grid([0, 1, 2]), [0, 1, 4])
        with pytest.raises(StencilOutOfRangeError):
            divided_difference(samples, 1, 2)
        with pytest.raises(StencilOutOfRangeError):
            divided_difference(samples, -1, 1)

    @pytest.mark.parametrize("seed", range(20))
    def test_closed_form_matches_recursion(self, seed):
        rng = np.random.default_rng(seed)
        x = np.sort(rng.uniform(-1, 1, 12))
        f = rng.normal(size=12)
        closed = second_divided_differences(x, f)
        recursive = [newton_coefficients(x[i : i + 3], f[i : i + 3])[-1] for i in range(10)]
        np.testing.assert_allclose(
            closed, recursive, rtol=1e-12, atol=1e-12 * np.abs(closed).max()
        )

    @pytest.mark.parametrize("seed", range(10))
    def test_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        x = np.sort(rng.uniform(0, 1, 5))
        f = rng.normal(size=5)
        perm = rng.permutation(5)
        assert newton_coefficients(x[perm], f[perm])[-1] == pytest.approx(
            newton_coefficients(x, f)[-1], rel=1e-6
        )

    def test_polynomial_top_difference_vanishes(self):
        g = generate_quasi_uniform(10, (0, 1), 1.4, seed=2)
        samples = sample(lambda x: 1 - 2 * x + 3 * x**2, g)
        table = divided_difference_table(samples, 3)
        np.testing.assert_allclose(table[2], 3.0, rtol=1e-10)
        np.testing.assert_allclose(table[3], 0.0, atol=1e-8)

    def test_table_rejects_high_order(self):
        samples = Samples(build_grid([0, 1, 2]), [0, 1, 4])
        with pytest.raises(StencilOutOfRangeError):
            divided_difference_table(samples, 3)


class TestFitNewton:
    def test_single_point(self):
        samples = Samples(build_grid([0, 1, 2]), [5, 6, 7])
        p = fit_newton(samples, [1])
        assert p.degree == 0
        assert p(0.3) == 6.0
        assert p(17.0) == 6.0

    @pytest.mark.parametrize("seed", range(5))
    def test_linear_exactness(self, seed):
        rng = np.random.default_rng(seed)
        p = newton_through([0.0, 0.7], [1.0, 2.4])
        pts = rng.uniform(-1, 2, 100)
        np.testing.assert_allclose(p(pts), 1 + 2 * pts, rtol=1e-12, atol=1e-13)

    def test_cubic_leading_coefficient(self):
        x = np.array([-0.4, 0.1, 0.35, 0.9])
        p = newton_through(x, x**3)
        assert p.coeffs[3] == pytest.approx(1.0, abs=1e-10)

    def test_square_extrapolation(self):
        p = newton_through([0.0, 1.0, 2.0], [0.0, 1.0, 4.0])
        assert eval_newton(p, 3.0) == pytest.approx(9.0)
        assert eval_newton(p, 0.5) == pytest.approx(0.25)

    def test_vectorized_evaluation(self):
        p = newton_through([0.0, 1.0, 2.0], [0.0, 1.0, 4.0])
        np.testing.assert_allclose(p(np.array([0.5, 1.5, -1.0])), [0.25, 2.25, 1.0])
        assert isinstance(p(0.5), float)

    def test_derivative(self):
        p = newton_through([0.0, 1.0, 2.0], [0.0, 1.0, 4.0])
        assert p.derivative_at(1.5) == pytest.approx(3.0)

    def test_stencil_recorded(self):
        samples = Samples(build_grid([0, 1, 2, 3]), [0, 1, 4, 9])
        assert fit_newton(samples, range(1, 4)).stencil == (1, 2, 3)

    @pytest.mark.parametrize("stencil", [[], [0, 4], [-1, 0], [1, 1]])
    def test_bad_stencil(self, stencil):
        samples = Samples(build_grid([0, 1, 2, 3]), [0, 1, 4, 9])
        with pytest.raises(StencilOutOfRangeError):
            fit_newton(samples, stencil)

    def test_values_shape_checked(self):
        with pytest.raises(ValueError):
            Samples(build_grid([0, 1, 2]), [0, 1])

    @pytest.mark.parametrize("bad", [np.inf, -np.inf, np.nan])
    def test_values_must_be_finite(self, bad):
        with pytest.raises(ValueError):
            Samples(build_grid([0, 1, 2]), [0, bad, 4])


class TestIntersect:
    def test_line_and_zero(self):
        zero = newton_through([0.0, 1.0], [0.0, 0.0])
        line = newton_through([0.0, 1.0], [-0.5, 0.5])
        psi = intersect_on_interval(zero, line, (0.0, 1.0))
        assert psi == pytest.approx(0.5, abs=1e-14)

    def test_abs_lines(self):
        left = newton_through([0.0, 0.1], [0.3, 0.2])
        right = newton_through([0.6, 0.7], [0.3, 0.4])
        assert intersect_on_interval(left, right, (0.2, 0.5)) == pytest.approx(0.3, abs=1e-12)

    def test_equal_polynomials(self):
        p = newton_through([0.0, 1.0, 2.0], [1.0, 3.0, 2.0])
        q = newton_through([0.0, 1.0, 2.0], [1.0, 3.0, 2.0])
        assert intersect_on_interval(p, q, (0.0, 1.0)) is None

    def test_no_crossing(self):
        p = newton_through([0.0, 1.0], [0.0, 0.0])
        q = newton_through([0.0, 1.0], [1.0, 2.0])
        assert intersect_on_interval(p, q, (0.0, 1.0)) is None

    def test_two_crossings(self):
        zero = newton_through([0.0, 1.0], [0.0, 0.0])
        parabola = newton_through([0.0, 0.5, 1.0], [1.0, -1.0, 1.0])
        assert intersect_on_interval(zero, parabola, (0.0, 1.0)) is None

    def test_crossing_must_be_interior(self):
        zero = newton_through([0.0, 1.0], [0.0, 0.0])
        line = newton_through([0.0, 1.0], [0.0, 1.0])
        assert intersect_on_interval(zero, line, (0.0, 1.0)) is None

    def test_empty_interval(self):
        p = newton_through([0.0, 1.0], [0.0, 1.0])
        with pytest.raises(ValueError):
            intersect_on_interval(p, p, (1.0, 1.0))

    @pytest.mark.parametrize("seed", range(30))
    def test_symmetric(self, seed):
        rng = np.random.default_rng(seed)
        x = np.array([0.0, 0.4, 1.0])
        p = newton_through(x, rng.normal(size=3))
        q = newton_through(x, rng.normal(size=3))
        forward = intersect_on_interval(p, q, (0.0, 1.0))
        backward = intersect_on_interval(q, p, (0.0, 1.0))
        if forward is None:
            assert backward is None
        else:
            assert backward == pytest.approx(forward, abs=1e-13)
