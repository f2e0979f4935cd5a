"""Tests for the test-function family and the convergence harness."""

import logging
import math

import numpy as np
import pandas as pd
import pytest

from corner_functions import (
    CornerFunction,
    abs_corner,
    counterexample_pair,
    f_d,
    polynomial_function,
)
from enosr import Mode, build_interpolant
from exceptions import NonpositiveErrorValueError
from grid import build_grid, generate_quasi_uniform
from harness import (
    STUDY_COLUMNS,
    convergence_study,
    fitted_order,
    order_sequence,
    run_studies,
    study_summary,
    study_to_frame,
    sup_error,
    write_study_csv,
)
from polynomial import sample


@pytest.fixture
def base_grid():
    return generate_quasi_uniform(21, (-1, 1), 2.0, seed=7)


@pytest.fixture
def default_grid():
    return generate_quasi_uniform(21, (-1, 1), 1.4, seed=7)


class TestFd:
    def test_continuous_at_corner(self):
        f = f_d(1.0)
        left = f(f.mu - 1e-12)
        assert left == pytest.approx(math.cos(math.pi**2 / 16), abs=1e-11)
        assert f(f.mu) == pytest.approx(math.cos(math.pi**2 / 16))

    def test_value_at_left_end(self):
        mu = math.pi / 8
        assert f_d(1.0)(-1.0) == pytest.approx((1 + mu) ** 2 - (1 + mu), rel=1e-12)
        assert f_d(1.0)(-1.0) == pytest.approx(0.546912, abs=1e-6)

    def test_derivative_jump(self):
        f = f_d(2.5)
        eps = 1e-6
        left = (f(f.mu) - f(f.mu - eps)) / eps
        right = (f(f.mu + eps) - f(f.mu)) / eps
        assert right - left == pytest.approx(-2.5, abs=1e-4)
        assert f.jump == -2.5

    def test_right_branch(self):
        assert f_d(4.0)(0.8) == pytest.approx(math.cos(0.4 * math.pi))


def test_counterexample_pair_agrees_on_nodes():
    g = generate_quasi_uniform(20, (0, 1), 1.4, seed=1)
    f_plus, f_minus = counterexample_pair(g, 8)
    np.testing.assert_array_equal(f_plus(g.nodes), f_minus(g.nodes))
    assert f_plus.mu == g.nodes[8]
    assert f_minus.mu == g.nodes[9]


class TestOrders:
    def test_fourth_order(self):
        assert order_sequence([1.0, 1.0 / 16]) == [4.0]

    def test_measured_pair(self):
        assert order_sequence([2.9630e-05, 1.3626e-06])[0] == pytest.approx(4.4427, abs=1e-4)

    def test_stagnation(self):
        assert order_sequence([3e-3, 3e-3]) == [0.0]

    @pytest.mark.parametrize("errors", [[1.0, 0.0], [-1.0, 0.5], [1.0, float("nan")]])
    def test_nonpositive(self, errors):
        with pytest.raises(NonpositiveErrorValueError):
            order_sequence(errors)

    def test_fitted_order(self):
        assert fitted_order([1.0, 1 / 16, 1 / 256]) == pytest.approx(4.0)
        assert fitted_order([5.0, 1.0, 0.5, 0.25], last=3) == pytest.approx(1.0)

    def test_fitted_order_missing(self):
        assert fitted_order([1.0, None, 0.1]) is None
        assert fitted_order([1.0]) is None


class TestSupError:
    def test_polynomial_exact(self):
        g = generate_quasi_uniform(15, (-1, 1), 1.4, seed=2)
        f = polynomial_function([1.0, 0.5, -0.25, 2.0])
        interpolant = build_interpolant(sample(f.evaluate, g), 4, Mode.LAGRANGE)
        assert sup_error(f, interpolant) <= 1e-12

    def test_abs_corner(self):
        f = abs_corner(0.43)
        g = build_grid(np.linspace(0, 1, 21))
        interpolant = build_interpolant(sample(f.evaluate, g), 4)
        assert sup_error(f, interpolant) <= 1e-10

    def test_needs_two_probes(self):
        f = abs_corner(0.43)
        g = build_grid(np.linspace(0, 1, 21))
        with pytest.raises(ValueError):
            sup_error(f, build_interpolant(sample(f.evaluate, g), 4), 1)


class TestConvergenceStudy:
    def test_rows(self, base_grid):
        rows = convergence_study(f_d(4.0), base_grid, 3, 4)
        assert [row.level for row in rows] == [0, 1, 2]
        assert rows[0].p is None
        assert rows[0].P is None
        assert rows[1].h_max == pytest.approx(rows[0].h_max / 2, rel=1e-12)
        assert all(row.E > 0 for row in rows)
        assert rows[2].psi == pytest.approx(math.pi / 8, abs=1e-4)

    def test_non_enosr_has_no_location(self, base_grid):
        rows = convergence_study(f_d(4.0), base_grid, 2, 4, "eno")
        assert all(row.e is None and row.p is None for row in rows)
        assert rows[1].P is not None

    def test_corner_outside_domain(self):
        g = generate_quasi_uniform(21, (0.5, 1), 1.4, seed=7)
        with pytest.raises(ValueError):
            convergence_study(f_d(1.0), g, 2, 4)

    def test_limited_smoothness_is_reported(self, base_grid, caplog):
        kink = CornerFunction(
            "x|x|", lambda x: x * np.abs(x), None, 0.0, 2.0, smoothness=2
        )
        assert f_d(1.0).expected_order(4) == 4
        assert kink.expected_order(4) == 2
        with caplog.at_level(logging.WARNING, logger="harness"):
            convergence_study(kink, base_grid, 1, 4)
        assert "capped at 2" in caplog.text

    def test_parallel_matches_serial(self, base_grid):
        serial = convergence_study(f_d(1.0), base_grid, 3, 4, n_jobs=1)
        parallel = convergence_study(f_d(1.0), base_grid, 3, 4, n_jobs=2)
        assert [r.E for r in serial] == [r.E for r in parallel]
        assert [r.e for r in serial] == [r.e for r in parallel]


class TestStudyTable:
    def test_frame_and_csv(self, base_grid, tmp_path):
        frame = run_studies([4.0, 1.0], base_grid, 3, 4)
        assert list(frame.columns) == STUDY_COLUMNS
        assert len(frame) == 6
        assert frame["k"].tolist() == [0, 1, 2, 0, 1, 2]

        path = tmp_path / "study.csv"
        write_study_csv(frame, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "d,k,h_max,e_k,p_k,E_k,P_k"
        assert lines[1].split(",")[4] == ""
        assert lines[1].split(",")[6] == ""

        loaded = pd.read_csv(path)
        np.testing.assert_allclose(loaded["E_k"], frame["E_k"])

    def test_summary(self, base_grid):
        rows = convergence_study(f_d(4.0), base_grid, 3, 4)
        summary = study_summary(study_to_frame(rows, 4.0))
        assert summary["d"].tolist() == [4.0]
        assert summary["interpolation_order"].iloc[0] > 0


def _fitted(frame, column):
    values = [None if math.isnan(v) else float(v) for v in frame[column]]
    return fitted_order(values)


@pytest.mark.slow
@pytest.mark.parametrize("d", [4.0, 1.0, 0.25])
def test_enosr_recovers_fourth_order(default_grid, d):
    frame = run_studies([d], default_grid, 7, 4, Mode.ENOSR)
    assert 3.3 <= _fitted(frame, "e_k") <= 5.5
    assert 3.6 <= _fitted(frame, "E_k") <= 4.8


@pytest.mark.slow
def test_lagrange_stalls_near_corner(default_grid):
    lagrange = run_studies([1.0], default_grid, 6, 4, Mode.LAGRANGE)
    enosr = run_studies([1.0], default_grid, 6, 4, Mode.ENOSR)
    assert _fitted(lagrange, "E_k") <= 2.5
    assert _fitted(enosr, "E_k") >= 3.5


@pytest.mark.slow
def test_weak_corner_is_found_on_fine_grids(default_grid):
    d = 1 / 64
    frame = run_studies([d], default_grid, 9, 4, Mode.ENOSR)
    h_c = f_d(d).critical_spacing()
    coarse = frame[frame["h_max"] > h_c]
    fine = frame[frame["h_max"] < h_c]
    assert len(fine) >= 3

    e0 = coarse["e_k"].iloc[0]
    assert math.isnan(e0) or e0 >= 1e-2
    # single-level ratios swing between about 2^3 and 2^6 as mu moves
    assert _fitted(fine, "e_k") >= 3.3
    assert fine["e_k"].iloc[-1] < 1e-8


@pytest.mark.parametrize("seed", range(100))
def test_smooth_function_error_scales_with_h4(seed):
    grid = generate_quasi_uniform(21, (-1, 1), 1.4, seed=seed)
    smooth = CornerFunction("cos", lambda x: np.cos(np.pi * x / 2), None, 0.0, 0.0)
    for row in convergence_study(smooth, grid, 4, 4):
        assert row.E <= 50 * row.h_max**4
