import numpy as np
import pytest
from numpy.testing import assert_allclose

from errors import CFLViolation, NotDivergenceFree
from fields import divergence
from models import Diffeo, Grid2D, LagrangianState, ScalarField, SolverParams, VectorField2
from solver import (
    div_diagnostic,
    fit_growth_rate,
    flow_map,
    flow_map_Psi,
    scaled_solution_map,
    solution_map_Phi,
    solve,
    solve_final,
    vector_field,
)
from spectral import relative_sobolev_error
from tests.helpers import scalar, taylor_green_velocity


def test_rest_stays_at_rest(grid16):
    params = SolverParams(dt=0.01, T=10.0)
    trajectory = solve(VectorField2.zeros(grid16, 'velocity'), None, params)
    final = trajectory.final
    assert final.t == 10.0
    assert final.phi.is_identity()
    assert final.v.is_zero()
    assert len(trajectory.times) == 2


def test_vector_field_at_identity(grid32):
    u0 = taylor_green_velocity(grid32)
    d_phi, d_v = vector_field(LagrangianState(Diffeo.identity(grid32), u0), None)
    assert d_phi is u0
    x1, x2 = grid32.coordinates
    assert_allclose(d_v.u1.values, 0.5 * np.sin(2 * x1), atol=1e-12)
    assert_allclose(d_v.u2.values, 0.5 * np.sin(2 * x2), atol=1e-12)


def test_vector_field_adds_buoyancy(grid32):
    theta0 = scalar(grid32, lambda x1, x2: np.cos(x1), 'theta')
    _, d_v = vector_field(LagrangianState(Diffeo.identity(grid32), VectorField2.zeros(grid32)), theta0)
    # cos x1 has no pressure part, so it accelerates the fluid directly
    assert d_v.u1.max_abs() < 1e-13
    assert_allclose(d_v.u2.values, theta0.values, atol=1e-13)


def test_zero_horizon_returns_datum(grid16):
    u0 = taylor_green_velocity(grid16, 0.1)
    u, theta = solution_map_Phi(u0, None, SolverParams(dt=0.01, T=0.0))
    assert_allclose(u.u1.values, u0.u1.values)
    assert theta.is_zero()


def test_taylor_green_is_steady(grid32):
    u0 = taylor_green_velocity(grid32, 0.5)
    u, _ = solution_map_Phi(u0, None, SolverParams(dt=0.05, T=0.5))
    assert (u - u0).max_abs() < 1e-3 * u0.max_abs()


def test_time_scaling(grid16):
    u0 = taylor_green_velocity(grid16, 0.2)
    theta0 = scalar(grid16, lambda x1, x2: 0.1 * np.cos(x1), 'theta')
    params = SolverParams(dt=0.05, T=0.5)
    direct_u, direct_theta = solution_map_Phi(u0, theta0, params)
    scaled_u, scaled_theta = scaled_solution_map(u0, theta0, 0.5, params)
    assert relative_sobolev_error(scaled_u, direct_u, 3.0) < 1e-8
    assert relative_sobolev_error(scaled_theta, direct_theta, 3.0) < 1e-8


def test_scaled_map_below_one_step(grid16):
    u0 = taylor_green_velocity(grid16, 0.1)
    theta0 = scalar(grid16, lambda x1, x2: 0.1 * np.cos(x1), 'theta')
    u, theta = scaled_solution_map(u0, theta0, 1e-3, SolverParams(dt=0.01, T=1.0))
    assert (u - u0).max_abs() < 1e-3
    assert (theta - theta0).max_abs() < 1e-3


def test_scaled_map_rejects_zero_horizon(grid16):
    with pytest.raises(ValueError):
        scaled_solution_map(VectorField2.zeros(grid16), None, 0.0, SolverParams())


def test_cfl_violation(grid16):
    with pytest.raises(CFLViolation):
        solve(taylor_green_velocity(grid16, 1.0), None, SolverParams(dt=0.5, T=1.0))


def test_rejects_compressible_datum(grid16):
    u0 = VectorField2(scalar(grid16, lambda x1, x2: np.sin(x1), 'velocity'), ScalarField.zeros(grid16))
    with pytest.raises(NotDivergenceFree):
        solve(u0, None, SolverParams(dt=0.05, T=0.1))

    trajectory = solve(u0, None, SolverParams(dt=0.05, T=0.1, require_divfree=False))
    assert trajectory.final.t == pytest.approx(0.1)


def test_transport_and_divergence_diagnostics(grid64):
    u0 = taylor_green_velocity(grid64, 0.5)
    theta0 = scalar(grid64, lambda x1, x2: 0.1 * np.cos(x1) + 0.05 * np.sin(x2), 'theta')
    params = SolverParams(dt=0.05, T=0.2, save_every=2)
    trajectory = solve(u0, theta0, params)

    assert trajectory.times == pytest.approx([0.0, 0.1, 0.2])
    assert max(trajectory.series('transport_residual')) < 1e-4
    assert trajectory.diagnostics[0]['min_det'] == 1.0

    divergence = np.array(div_diagnostic(trajectory))
    assert np.max(divergence / trajectory.series('u_norm_l2')) < 1e-3


def test_divergence_growth_of_compressible_datum(grid32):
    x1, _ = grid32.coordinates
    kick = VectorField2(ScalarField(grid32, 1e-3 * np.sin(x1), 'velocity'), ScalarField.zeros(grid32))
    u0 = taylor_green_velocity(grid32, 0.2) + kick
    trajectory = solve(u0, None, SolverParams(dt=0.05, T=0.5, save_every=2, require_divfree=False))

    series = div_diagnostic(trajectory)
    assert len(series) == 6
    assert series[0] == pytest.approx(divergence(u0).l2_norm(), rel=1e-12)
    assert min(series) > 0
    assert 0.25 < series[-1] / series[0] < 4

    rate = fit_growth_rate(trajectory.times, series)
    assert np.isfinite(rate)
    assert abs(rate) < 4


def test_flow_map_at_save_times(grid16):
    trajectory = solve(taylor_green_velocity(grid16, 0.1), None, SolverParams(dt=0.1, T=0.2))
    assert flow_map(trajectory, 0.0).is_identity()
    assert flow_map(trajectory, 0.2) is trajectory.final.phi
    with pytest.raises(ValueError):
        flow_map(trajectory, 0.15)


def test_flow_map_psi_matches_final_state(grid16):
    u0 = taylor_green_velocity(grid16, 0.1)
    params = SolverParams(dt=0.1, T=0.3)
    phi = flow_map_Psi(u0, None, params)
    final = solve_final(u0, None, params)
    assert (phi.displacement - final.phi.displacement).max_abs() == 0.0


def test_fit_growth_rate():
    times = [0.0, 1.0, 2.0, 3.0]
    assert fit_growth_rate(times, np.exp(0.5 * np.array(times))) == pytest.approx(1.0)
    assert fit_growth_rate(times, [0.0, 0.0, 0.0, 0.0]) == 0.0


def test_mismatched_grids_rejected():
    u0 = VectorField2.zeros(Grid2D(16, 2 * np.pi))
    theta0 = ScalarField.zeros(Grid2D(32, 2 * np.pi))
    with pytest.raises(ValueError):
        solve(u0, theta0, SolverParams(dt=0.1, T=0.1))
