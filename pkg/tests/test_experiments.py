import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from errors import ConfigError, DegenerateDirection, UnresolvableBump
from experiments import (
    CSV_COLUMNS,
    ExperimentRecord,
    build_sequences,
    check_norm_equivalence,
    check_scaling,
    derivative_identity_report,
    estimate_direction_derivative,
    estimate_lipschitz,
    estimate_m,
    make_experiment_config,
    measure_member,
    norm_ratio,
    run_nonuniform,
    sequence_radius,
    set_distance,
    summarize,
)
from experiments.nonuniform import MAX_SUPPORT_SCALE, m_from_derivative, resolve_support_scale
from fields import bump
from models import Diffeo, Grid2D, ScalarField, SolverParams, VectorField2
from tests.helpers import scalar, taylor_green_velocity
from utils import probe_direction

X_STAR = (4.0, 8.0)


@pytest.fixture
def box():
    return Grid2D(32, 16.0)


@pytest.fixture
def experiment(box):
    u_star = probe_direction(box, X_STAR, 1.0)
    return make_experiment_config(
        'rest', VectorField2.zeros(box, 'velocity'), None, u_star, X_STAR, R=1.0,
        n_list=[2, 1], params=SolverParams(dt=0.1, T=1.0, diagnostics=False))


class TestConfig:
    def test_direction_is_normalized(self, experiment):
        assert experiment.w_star_norm == pytest.approx(1.0, rel=1e-12)
        assert experiment.n_list == (1, 2)
        assert experiment.theta0.is_zero()

    def test_zero_direction_rejected(self, box):
        zero = VectorField2.zeros(box)
        with pytest.raises(DegenerateDirection):
            make_experiment_config('z', zero, None, zero, X_STAR, 1.0, [1], SolverParams())

    def test_theta0_too_close_to_probe_point(self, box):
        theta0 = bump((6.0, 8.0), 1.5, box)
        u_star = probe_direction(box, X_STAR, 1.0)
        with pytest.raises(ConfigError):
            make_experiment_config('near', VectorField2.zeros(box), theta0, u_star, X_STAR, 1.0,
                                   [1], SolverParams())

    @pytest.mark.parametrize('R,n_list', [(0.0, [1]), (1.0, []), (1.0, [0, 2])])
    def test_bad_parameters(self, box, R, n_list):
        u_star = probe_direction(box, X_STAR, 1.0)
        with pytest.raises(ConfigError):
            make_experiment_config('bad', VectorField2.zeros(box), None, u_star, X_STAR, R,
                                   n_list, SolverParams())


class TestDerivative:
    def test_at_rest_equals_direction(self, experiment):
        derivative = estimate_direction_derivative(
            experiment.base, experiment.direction, X_STAR, experiment.params)
        # x* = (4, 8) is the node (8, 16) of the 0.5-spaced grid
        expected = [experiment.u_star.u1.values[8, 16], experiment.u_star.u2.values[8, 16]]
        assert_allclose(derivative, expected, atol=1e-7)
        assert np.linalg.norm(derivative) > 1e-3

    def test_zero_direction(self, experiment, box):
        zero = (VectorField2.zeros(box), ScalarField.zeros(box))
        assert np.array_equal(
            estimate_direction_derivative(experiment.base, zero, X_STAR, experiment.params), [0.0, 0.0])

    def test_m_from_derivative(self):
        assert m_from_derivative(np.array([0.3, 0.4]), 2.0) == pytest.approx(0.125)
        with pytest.raises(DegenerateDirection):
            m_from_derivative(np.array([1e-10, 0.0]), 1.0)

    def test_estimate_m_at_rest(self, experiment):
        derivative = estimate_direction_derivative(
            experiment.base, experiment.direction, X_STAR, experiment.params)
        assert estimate_m(experiment) == pytest.approx(
            m_from_derivative(derivative, experiment.w_star_norm), rel=1e-12)

    def test_lipschitz_bound_covers_identity(self, experiment):
        assert estimate_lipschitz(experiment) >= 1.1


class TestSequences:
    def test_sequence_radius(self):
        assert sequence_radius(0.1, 2.0, 1.0, 10) == pytest.approx(6.25e-4)
        assert sequence_radius(0.1, 2.0, 1.0, 10, scale=4.0) == pytest.approx(2.5e-3)

    def test_unresolvable_members_reported(self, experiment):
        config = make_experiment_config(
            'mixed', experiment.u0, None, experiment.u_star, X_STAR, 1.0, [1, 4],
            experiment.params)
        members, failures, scale = build_sequences(config, 16.0, 1.0)
        assert scale == 1.0
        assert list(members) == [1]
        assert failures == {4: pytest.approx(0.5)}

        member = members[1]
        assert member.r_n == pytest.approx(2.0)
        assert (member.probe[0] - member.base[0] - config.u_star).max_abs() < 1e-15

    def test_all_unresolvable(self, experiment):
        config = make_experiment_config(
            'tiny', experiment.u0, None, experiment.u_star, X_STAR, 1.0, [1, 2],
            experiment.params, support_scale=1.0)
        with pytest.raises(UnresolvableBump):
            build_sequences(config, 1.0, 1.0)

    def test_auto_scale_is_capped(self, experiment):
        config = make_experiment_config(
            'auto', experiment.u0, None, experiment.u_star, X_STAR, 1.0, [1, 2],
            experiment.params, support_scale='auto')
        assert resolve_support_scale(config, 1.0, 1.0) == MAX_SUPPORT_SCALE
        assert resolve_support_scale(config, 1000.0, 1.0) == 1.0

    @pytest.mark.parametrize('scale', [0.0, 2.5, 12.5])
    def test_scale_out_of_range(self, experiment, scale):
        with pytest.raises(ConfigError):
            make_experiment_config('wide', experiment.u0, None, experiment.u_star, X_STAR, 1.0,
                                   [1], experiment.params, support_scale=scale)


class TestGeometry:
    def test_periodic_set_distance(self, grid16):
        L = grid16.box_length
        first = np.array([[0.1, 1.0]])
        second = np.array([[L - 0.1, 1.0], [3.0, 3.0]])
        assert set_distance(grid16, first, second) == pytest.approx(0.2)
        assert set_distance(grid16, first, np.empty((0, 2))) == math.inf

    def test_norm_ratio_identity(self, grid32):
        theta = bump((3.0, 3.0), 1.0, grid32)
        assert norm_ratio(theta, Diffeo.identity(grid32), 3.0) == 1.0


class TestChecks:
    def test_scaling_residuals(self, grid16):
        u0 = taylor_green_velocity(grid16, 0.2)
        theta0 = scalar(grid16, lambda x1, x2: 0.1 * np.cos(x1), 'theta')
        params = SolverParams(dt=0.05, T=0.5)
        identity = check_scaling(u0, theta0, 0.5, 1.0, params)
        assert identity['state_residual'] < 1e-12
        assert identity['phi_T_residual'] < 1e-8

        doubled = check_scaling(u0, theta0, 0.5, 2.0, params)
        assert doubled['state_residual'] < 1e-8

    def test_derivative_identity(self, grid16):
        report = derivative_identity_report(taylor_green_velocity(grid16, 0.1), SolverParams(dt=0.1, T=1.0))
        assert report['relative_error'] < 1e-3
        assert report['richardson_consistent']


class TestMeasurement:
    @pytest.fixture
    def drift(self):
        # On the unit box a constant field has H^s norm 1, and Psi is the translation by T u*.
        grid = Grid2D(64, 1.0)
        u_star = VectorField2(ScalarField(grid, np.ones((64, 64)), 'velocity'), ScalarField.zeros(grid))
        return make_experiment_config(
            'drift', VectorField2.zeros(grid, 'velocity'), None, u_star, (0.25, 0.5), R=2.5,
            n_list=[1], params=SolverParams(dt=0.00625, T=0.5, diagnostics=False),
            support_scale=2.0)

    def test_translated_supports_separate(self, drift):
        m = 0.25
        members, failures, scale = build_sequences(drift, m, 1.1)
        assert not failures
        member = members[1]
        assert member.r_n == pytest.approx(2.0 * m / 8.8)

        record = measure_member(drift, member, m, scale)
        assert record.status == 'ok'
        assert record.input_gap == pytest.approx(1.0, rel=1e-9)
        assert record.output_gap > drift.R / 2
        assert record.separation == pytest.approx(0.5, rel=1e-3)
        assert record.lower_bound_separation == pytest.approx(0.125)
        assert record.separation >= record.lower_bound_separation
        assert record.image_radius_bound == pytest.approx(0.0625)
        assert max(record.image_radius, record.image_radius_probe) <= record.image_radius_bound
        assert record.supports_disjoint
        assert record.in_ball
        assert record.ratio_min == pytest.approx(1.0, abs=1e-2)
        assert record.ratio_max == pytest.approx(1.0, abs=1e-2)


def passing_records(ns):
    return [ExperimentRecord(n=n, r_n=0.1 / n, input_gap=1.0 / n, output_gap=0.8,
                             separation=0.5 / n, lower_bound_separation=0.25 / n,
                             supports_disjoint=True, ratio_min=0.9, ratio_max=1.1, in_ball=True)
            for n in ns]


class TestSummary:
    def summary(self, experiment, records):
        return summarize(experiment, records, 0.5, 1.1, np.array([1.0, 0.0]), 1.0, math.inf, math.inf)

    def test_passes_when_every_gate_holds(self, experiment):
        summary = self.summary(experiment, passing_records([2, 4, 8, 16]))
        assert summary['slope_input'] == pytest.approx(-1.0, abs=1e-9)
        assert summary['gap_retention'] == pytest.approx(1.0)
        assert summary['input_gap_drop'] == pytest.approx(8.0)
        assert summary['input_gap_drop_ok']
        assert summary['separation_ok']
        assert summary['supports_disjoint']
        assert summary['norm_band_ok']
        assert summary['passed']

    def test_overlapping_supports_fail(self, experiment):
        records = passing_records([2, 4, 8, 16])
        records[2].supports_disjoint = False
        summary = self.summary(experiment, records)
        assert summary['separation_ok']
        assert not summary['supports_disjoint']
        assert not summary['passed']

    def test_short_sweep_fails(self, experiment):
        summary = self.summary(experiment, passing_records([2, 4]))
        assert summary['input_gap_drop'] == pytest.approx(2.0)
        assert not summary['input_gap_drop_ok']
        assert not summary['passed']

    def test_separation_below_bound_fails(self, experiment):
        records = passing_records([2, 4, 8, 16])
        records[-1].separation = 0.1 / 16
        summary = self.summary(experiment, records)
        assert not summary['separation_ok']
        assert not summary['passed']

    def test_lost_output_gap_fails(self, experiment):
        records = passing_records([2, 4, 8, 16])
        records[-1].output_gap = 0.2
        summary = self.summary(experiment, records)
        assert summary['gap_retention'] == pytest.approx(0.25)
        assert not summary['passed']


class TestRun:
    def test_literal_radii_unresolvable_at_small_n(self, experiment):
        records, summary = run_nonuniform(experiment)
        assert [r.n for r in records] == [1, 2]
        for record in records:
            assert not record.measured
            assert record.status == 'unresolvable'
            assert record.r_n < 2 * experiment.grid.spacing
            assert len(record.csv_row()) == len(CSV_COLUMNS)
        assert summary['support_scale'] == 1.0
        assert summary['resolvable_n'] == []
        assert summary['failed_n'] == [1, 2]
        assert summary['supports_disjoint'] is None
        assert not summary['passed']

        table = check_norm_equivalence(experiment, records)
        assert table['ratios'] == {}
        assert table['C1'] is None

    def test_failed_record_has_no_measurements(self):
        record = ExperimentRecord(n=3, status='unresolvable')
        assert not record.measured
        assert record.to_dict()['status'] == 'unresolvable'
