import numpy as np
import pytest
from numpy.testing import assert_allclose

from errors import CFLViolation
from fields import curl, divergence, make_divfree_from_stream
from models import ScalarField, SolverParams, VectorField2
from solver import (
    buoyancy_sign_check,
    integrate_eulerian,
    kinetic_energy,
    solution_map_Phi,
    solve_eulerian,
    velocity_from_vorticity,
    velocity_tendency,
    vorticity_tendency,
)
from spectral import relative_sobolev_error
from tests.helpers import scalar, taylor_green_velocity


def smooth_flow(grid, amplitude=0.3) -> VectorField2:
    psi = scalar(grid, lambda x1, x2: amplitude * (np.sin(x1) * np.cos(2 * x2) + np.cos(x1 + x2)), 'stream')
    return make_divfree_from_stream(psi)


class TestBiotSavart:
    def test_single_mode(self, grid16):
        u = velocity_from_vorticity(scalar(grid16, lambda x1, x2: np.sin(x1)))
        assert u.u1.max_abs() < 1e-14
        assert_allclose(u.u2.values, -np.cos(grid16.coordinates[0]), atol=1e-14)

    def test_inverts_curl(self, grid32):
        u = smooth_flow(grid32)
        assert (velocity_from_vorticity(curl(u)) - u).max_abs() < 1e-13

    def test_mean_velocity_is_added(self, grid16):
        u = velocity_from_vorticity(ScalarField.zeros(grid16), mean=(0.5, -1.0))
        assert_allclose(u.u1.values, 0.5)
        assert_allclose(u.u2.values, -1.0)


class TestTendencies:
    def test_taylor_green_vorticity_is_steady(self, grid32):
        u = taylor_green_velocity(grid32)
        d_omega, d_theta = vorticity_tendency(curl(u), ScalarField.zeros(grid32))
        assert d_omega.max_abs() < 1e-12
        assert d_theta.max_abs() < 1e-15

    def test_buoyancy_source(self, grid32):
        theta = scalar(grid32, lambda x1, x2: np.sin(x1))
        d_omega, _ = vorticity_tendency(ScalarField.zeros(grid32), theta)
        assert_allclose(d_omega.values, np.cos(grid32.coordinates[0]), atol=1e-13)

    def test_velocity_tendency_is_divergence_free(self, grid32):
        theta = scalar(grid32, lambda x1, x2: 0.2 * np.cos(x1 - x2))
        assert divergence(velocity_tendency(smooth_flow(grid32), theta)).max_abs() < 1e-12

    def test_buoyancy_sign(self, grid32):
        theta = scalar(grid32, lambda x1, x2: 0.2 * np.cos(x1) + 0.1 * np.sin(x1 + x2))
        report = buoyancy_sign_check(taylor_green_velocity(grid32, 0.5), theta)
        assert report['sign'] == 1.0
        assert report['mismatch_plus'] < 1e-8
        assert report['mismatch_minus'] > 1e-2


class TestIntegration:
    def test_taylor_green_is_steady(self, grid32):
        u0 = taylor_green_velocity(grid32, 0.5)
        u, theta = solve_eulerian(u0, None, 0.5, 0.05)
        assert (u - u0).max_abs() < 1e-12
        assert theta.is_zero()

    def test_energy_is_conserved(self, grid32):
        u0 = smooth_flow(grid32)
        _, history = integrate_eulerian(u0, None, 0.5, 0.01, record_every=10)
        energies = np.array([h['energy'] for h in history])
        assert energies[0] == pytest.approx(kinetic_energy(u0))
        assert np.max(np.abs(energies - energies[0])) < 1e-6 * energies[0]
        assert max(abs(h['omega_mean']) for h in history) < 1e-15

    def test_uniform_buoyancy_accelerates_mean_flow(self, grid16):
        theta0 = ScalarField(grid16, np.full((16, 16), 0.1), 'theta')
        state, _ = integrate_eulerian(VectorField2.zeros(grid16), theta0, 1.0, 0.1)
        assert state.mean_velocity == pytest.approx((0.0, 0.1), abs=1e-14)
        assert state.omega.max_abs() < 1e-14

    def test_cfl_violation(self, grid16):
        with pytest.raises(CFLViolation):
            integrate_eulerian(taylor_green_velocity(grid16, 1.0), None, 1.0, 0.5)

    def test_agrees_with_lagrangian_solver(self, grid32):
        u0 = smooth_flow(grid32, 0.2)
        theta0 = scalar(grid32, lambda x1, x2: 0.1 * np.cos(x1) + 0.05 * np.sin(x1 + x2), 'theta')
        u_lagrangian, theta_lagrangian = solution_map_Phi(u0, theta0, SolverParams(dt=0.02, T=0.2))
        u_eulerian, theta_eulerian = solve_eulerian(u0, theta0, 0.2, 0.02)
        assert relative_sobolev_error(u_lagrangian, u_eulerian, 1.0) < 1e-2
        assert relative_sobolev_error(theta_lagrangian, theta_eulerian, 1.0) < 1e-2
