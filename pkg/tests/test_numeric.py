"""
Tests for Grids, Field Evaluation, Residuals and Profile Checks
===============================================================
"""

from fractions import Fraction

import pytest
import numpy as np
import pandas as pd
import sympy as sp

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.numeric.fields import (
    FieldError,
    breather,
    eval_field,
    export_csv,
    kdv_profile,
    line_soliton_profile,
    mkdv_rational_two_soliton,
    phase_field,
)
from src.numeric.grids import DEFAULT_STEP, Grid, GridError, default_grid, parse_grid
from src.numeric.profiles import profile_checks, rho_identity
from src.numeric.residuals import (
    ORDER_TARGET,
    ORDER_WINDOW,
    StencilError,
    convergence_study,
    fd_residual,
    get_tolerance,
    max_residual,
    observed_order,
)
from src.phases.constructors import galilean, kdv_soliton, kdv_vertical, line_soliton, mkdv_soliton, wave
from src.phases.presets import build_preset

HALF = Fraction(1, 2)


@pytest.fixture
def small_grid():
    return parse_grid('-3,3,25,-3,3,25')


@pytest.fixture
def time_grid():
    """x in [-5, 5], time in [-2, 2] for the (1+1)-dimensional models."""
    return Grid(x_range=(-5.0, 5.0, 41), y_range=(-2.0, 2.0, 17))


class TestGrid:
    def test_defaults(self):
        grid = default_grid()
        assert grid.shape == (201, 201)
        assert grid.spacing == pytest.approx((0.1, 0.1))
        assert grid.t0 == 0.0

    def test_parse(self):
        grid = parse_grid('-1, 1, 11, 0, 2, 21', t0=0.5)
        assert grid.shape == (21, 11)
        assert grid.t0 == 0.5
        assert grid.to_dict() == {'t0': 0.5, 'x_range': [-1.0, 1.0, 11], 'y_range': [0.0, 2.0, 21]}

    def test_parse_errors(self):
        with pytest.raises(GridError, match='xmin,xmax,nx'):
            parse_grid('-1,1,11')
        with pytest.raises(GridError, match='Non-numeric'):
            parse_grid('-1,1,eleven,0,2,21')

    def test_too_few_nodes(self):
        with pytest.raises(GridError, match='at least'):
            Grid(x_range=(0.0, 1.0, 4))

    def test_degenerate_range(self):
        with pytest.raises(GridError, match='degenerate'):
            Grid(y_range=(1.0, 1.0, 20))

    def test_mesh_is_row_major_in_y(self, small_grid):
        X, Y = small_grid.mesh()
        assert X.shape == small_grid.shape
        assert np.all(X[0] == small_grid.x)
        assert np.all(Y[:, 0] == small_grid.y)

    def test_interior_mask(self, small_grid):
        mask = small_grid.interior_mask(0.5)
        assert mask.any()
        assert not mask[0].any() and not mask[:, -1].any()


class TestFieldEvaluation:
    def test_line_crest(self, small_grid):
        sample = eval_field(build_preset('fig1_left').theta, 'log', small_grid)
        assert sample.max == pytest.approx(1.125, abs=1e-9)

    def test_matches_sech_profile(self, small_grid):
        theta = line_soliton(2, 3, -HALF, 1).theta
        sample = eval_field(theta, 'log', small_grid)
        expected = eval_field(line_soliton_profile(2, 3, -HALF, 1), 'log', small_grid)
        np.testing.assert_allclose(sample.values, expected.values, atol=1e-12)

    def test_vertical_soliton_profile(self):
        grid = Grid(t0=0.3, x_range=(-4.0, 4.0, 33), y_range=(-1.0, 1.0, 9))
        sample = eval_field(kdv_vertical(Fraction(3, 4)).theta, 'log', grid)
        expected = eval_field(kdv_profile(0.75), 'log', grid)
        np.testing.assert_allclose(sample.values, expected.values, atol=1e-12)

    def test_far_field_stays_finite(self):
        grid = parse_grid('-200,200,41,-200,200,41')
        sample = eval_field(build_preset('fig1_center').theta, 'log', grid)
        assert np.all(np.isfinite(sample.values))
        assert sample.values.min() >= -1e-12

    def test_kdv_phase_over_time(self, time_grid):
        sample = eval_field(kdv_soliton(1), 'log', time_grid, 'KdV')
        assert sample.max == pytest.approx(0.5, abs=1e-2)

    def test_non_positive_phase(self, small_grid):
        with pytest.raises(FieldError, match='Θ > 0'):
            eval_field(wave(1) - wave(2), 'log', small_grid)

    def test_unknown_profile(self, small_grid):
        with pytest.raises(FieldError, match='Available'):
            eval_field(wave(1), 'tanh', small_grid)

    def test_unknown_model(self, small_grid):
        with pytest.raises(FieldError, match='Unknown model'):
            eval_field(wave(1), 'log', small_grid, 'Boussinesq')

    def test_arctan_profile(self):
        u = phase_field(mkdv_soliton(1), 'arctan2')
        x = np.linspace(-3, 3, 7)
        values = u(np.zeros_like(x), x, np.zeros_like(x))
        np.testing.assert_allclose(values, 1.0 / np.cosh(x), atol=1e-12)

    def test_summary(self, small_grid):
        summary = eval_field(build_preset('fig1_left').theta, 'log', small_grid, meta={'phase': 'fig1_left'}).summary()
        assert summary['phase'] == 'fig1_left'
        assert summary['profile'] == 'log'
        assert summary['model'] == 'KP'
        assert summary['max_u'] == pytest.approx(1.125, abs=1e-9)

    def test_closed_form_parameters_checked(self):
        with pytest.raises(FieldError):
            breather(0.0, 1.0)
        with pytest.raises(FieldError):
            mkdv_rational_two_soliton(-1.0, 1.0)


class TestExportCsv:
    def test_header_and_rows(self, small_grid, tmp_path):
        sample = eval_field(build_preset('fig1_left').theta, 'log', small_grid)
        path = tmp_path / 'out' / 'fig1_left.csv'
        export_csv(sample, path)
        assert path.read_text().splitlines()[0] == 'x,y,u'
        frame = pd.read_csv(path)
        assert len(frame) == 25 * 25
        assert frame['u'].max() == pytest.approx(1.125, abs=1e-9)
        assert frame['y'].iloc[0] == frame['y'].iloc[24]

    def test_unwritable_path(self, small_grid, tmp_path):
        sample = eval_field(wave(1) + wave(2), 'log', small_grid)
        blocker = tmp_path / 'file'
        blocker.write_text('')
        with pytest.raises(OSError, match='cannot write'):
            export_csv(sample, blocker / 'sub' / 'out.csv')

    def test_repeated_export_is_byte_identical(self, small_grid, tmp_path):
        theta = build_preset('fig1_center').theta
        first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
        export_csv(eval_field(theta, 'log', small_grid), first)
        export_csv(eval_field(theta, 'log', small_grid), second)
        assert first.read_bytes() == second.read_bytes()


class TestResiduals:
    def test_tolerance(self):
        assert get_tolerance('KP', 0.05) == pytest.approx(1.0)
        assert get_tolerance('KdV', 1e-5) == 1e-6
        with pytest.raises(ValueError, match='Available'):
            get_tolerance('NLS', 0.1)

    def test_observed_order(self):
        assert observed_order(4.0, 1.0) == pytest.approx(2.0)
        assert observed_order(0.0, 1.0) is None

    def test_line_soliton_converges(self, small_grid):
        report = fd_residual(build_preset('fig1_left').theta, 'KP', small_grid)
        assert report.passed
        assert abs(report.order - ORDER_TARGET) <= ORDER_WINDOW
        assert report.h == DEFAULT_STEP
        data = report.to_dict()
        assert data['order_window'] == [ORDER_TARGET - ORDER_WINDOW, ORDER_TARGET + ORDER_WINDOW]

    def test_galilean_line_converges(self, small_grid):
        theta = galilean(line_soliton(1, 1, -HALF, 1), HALF).theta
        report = fd_residual(theta, 'KP', small_grid)
        assert report.passed
        assert abs(report.order - ORDER_TARGET) <= ORDER_WINDOW

    def test_two_soliton_converges(self, small_grid):
        assert fd_residual(build_preset('fig1_center').theta, 'KP', small_grid).passed

    def test_kdv_soliton(self, time_grid):
        assert fd_residual(kdv_soliton(1), 'KdV', time_grid).passed

    def test_mkdv_closed_forms(self, time_grid):
        assert fd_residual(breather(1.0, 0.5), 'mKdV', time_grid).passed
        assert fd_residual(mkdv_rational_two_soliton(0.25, 1.0), 'mKdV', time_grid).passed
        assert fd_residual(mkdv_soliton(1), 'mKdV', time_grid, profile='arctan2').passed

    def test_non_solution_fails(self, time_grid):
        wrong_direction = kdv_profile(1.0)

        def u(t, x, y):
            return wrong_direction(-t, x, y)

        report = fd_residual(u, 'KdV', time_grid)
        assert not report.passed
        assert report.residual_h > 1e-2

    def test_stencil_errors(self, small_grid):
        u = phase_field(wave(1) + wave(2))
        with pytest.raises(StencilError, match='positive'):
            max_residual(u, 'KP', small_grid, 0.0)
        with pytest.raises(StencilError, match='no interior node'):
            max_residual(u, 'KP', small_grid, 2.0)

    def test_convergence_study(self, small_grid):
        study = convergence_study(build_preset('fig1_left').theta, 'KP', small_grid, [0.1, 0.05, 0.025])
        assert len(study['residuals']) == 3
        assert study['order'] == pytest.approx(2.0, abs=0.3)


class TestProfiles:
    def test_log_profile(self):
        result = profile_checks('log')
        assert result['passed']
        assert set(result['checks']) == {'initial_conditions', 'rho', 'fourth_order', 'rho_ode_identity'}

    def test_arctan_profile(self):
        result = profile_checks('arctan2')
        assert result['passed']
        assert result['checks']['h_equation']['symbolic_zero']

    def test_rho_identity_vanishes(self):
        assert sp.simplify(rho_identity()) == 0

    def test_bad_arguments(self):
        with pytest.raises(ValueError, match='Available'):
            profile_checks('sech')
        with pytest.raises(ValueError, match='s_range'):
            profile_checks('log', (0.0, 1.0))


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
