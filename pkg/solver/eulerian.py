"""Eulerian pseudo-spectral reference solver in vorticity form.

    omega_t = -u . grad omega + d1 theta
    theta_t = -u . grad theta
    u = mean + grad^perp Delta^{-1} omega,  grad^perp = (-d2, d1)

The mean velocity obeys d/dt mean = (0, mean theta). Integration runs on
Fourier coefficients so the vorticity keeps an exactly zero mean.
"""
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from errors import CFLViolation
from fields import advect_vector, advective_derivative, curl, leray_project
from models import EulerianState, Grid2D, ScalarField, SpectralCoeffs, VectorField2
from spectral import (
    MultiplierSymbol,
    apply_multiplier,
    compose_symbols,
    forward_transform,
    inverse_transform,
)

logger = logging.getLogger(__name__)

_STREAM = MultiplierSymbol.inverse_laplacian()
_PERP = (compose_symbols(MultiplierSymbol.gradient(2), scale=-1.0), MultiplierSymbol.gradient(1))


def _velocity_from_coeffs(omega_hat: np.ndarray, grid: Grid2D,
                          mean: Tuple[float, float] = (0.0, 0.0)) -> VectorField2:
    stream = apply_multiplier(SpectralCoeffs(grid, omega_hat), _STREAM)
    u1 = inverse_transform(apply_multiplier(stream, _PERP[0]), 'velocity')
    u2 = inverse_transform(apply_multiplier(stream, _PERP[1]), 'velocity')
    if mean != (0.0, 0.0):
        u1 = ScalarField(grid, u1.values + mean[0], 'velocity')
        u2 = ScalarField(grid, u2.values + mean[1], 'velocity')
    return VectorField2(u1, u2)


def velocity_from_vorticity(omega: ScalarField,
                            mean: Tuple[float, float] = (0.0, 0.0)) -> VectorField2:
    """Biot-Savart law on the torus; the mean of omega is ignored."""
    return _velocity_from_coeffs(forward_transform(omega).values, omega.grid, mean)


def _tendency(omega_hat: np.ndarray, theta_hat: np.ndarray, grid: Grid2D,
              mean: Tuple[float, float]) -> Tuple[np.ndarray, np.ndarray, Tuple[float, float]]:
    u = _velocity_from_coeffs(omega_hat, grid, mean)
    omega = inverse_transform(SpectralCoeffs(grid, omega_hat), 'vorticity')
    theta = inverse_transform(SpectralCoeffs(grid, theta_hat), 'theta')
    d_omega = -advective_derivative(u, omega).values
    d_omega = d_omega + MultiplierSymbol.gradient(1).evaluate(grid) * theta_hat
    d_omega[0, 0] = 0.0
    d_theta = -advective_derivative(u, theta).values
    d_theta[0, 0] = 0.0
    return d_omega, d_theta, (0.0, float(theta_hat[0, 0].real))


def vorticity_tendency(omega: ScalarField, theta: ScalarField) -> Tuple[ScalarField, ScalarField]:
    """(omega_t, theta_t) for zero-mean velocity"""
    grid = omega.grid
    d_omega, d_theta, _ = _tendency(
        forward_transform(omega).values, forward_transform(theta).values, grid, (0.0, 0.0))
    return (inverse_transform(SpectralCoeffs(grid, d_omega), 'vorticity tendency'),
            inverse_transform(SpectralCoeffs(grid, d_theta), 'theta tendency'))


def velocity_tendency(u: VectorField2, theta: ScalarField) -> VectorField2:
    """Velocity-form tendency u_t = P[-(u . grad) u + (0, theta)]"""
    c1, c2 = advect_vector(u, u)
    a1 = inverse_transform(c1, 'velocity')
    a2 = inverse_transform(c2, 'velocity')
    force = VectorField2(-a1, theta.with_role('velocity') - a2)
    return leray_project(force)


def buoyancy_sign_check(u: VectorField2, theta: ScalarField, delta: float = 1e-4) -> Dict[str, float]:
    """Compare a small velocity-form step against both signs of the d1 theta source.

    Returns the relative mismatch for each sign and the sign that fits.
    """
    omega = curl(u)
    stepped = curl(u + velocity_tendency(u, theta) * delta)
    rate = (stepped - omega) / delta
    d_omega, _ = vorticity_tendency(omega, theta)
    source = inverse_transform(
        apply_multiplier(forward_transform(theta), MultiplierSymbol.gradient(1)), 'source')
    transport = d_omega - source
    mismatch = {}
    for sign in (1, -1):
        candidate = transport + source * sign
        scale = max(candidate.max_abs(), 1e-300)
        mismatch[sign] = (rate - candidate).max_abs() / scale
    best = min(mismatch, key=mismatch.get)
    return {'sign': float(best), 'mismatch_plus': mismatch[1], 'mismatch_minus': mismatch[-1]}


def kinetic_energy(u: VectorField2) -> float:
    return 0.5 * u.l2_norm() ** 2


def integrate_eulerian(u0: VectorField2, theta0: Optional[ScalarField], T: float, dt: float,
                       cfl: float = 0.5, record_every: int = 0
                       ) -> Tuple[EulerianState, List[Dict[str, float]]]:
    """RK4 on (omega_hat, theta_hat, mean velocity) to time T.

    Returns the final state and diagnostics (t, energy, theta L2, omega mean),
    recorded at the start, every ``record_every`` steps and at the end.
    """
    grid = u0.grid
    if theta0 is None:
        theta0 = ScalarField.zeros(grid, 'theta')
    omega_hat = forward_transform(curl(u0)).values.copy()
    omega_hat[0, 0] = 0.0
    theta_hat = forward_transform(theta0).values.copy()
    mean = (u0.u1.mean(), u0.u2.mean())

    n_steps = 0 if T == 0 else max(1, int(np.ceil(T / dt - 1e-9)))
    h = T / n_steps if n_steps else 0.0
    history = []

    def record(t: float):
        u = _velocity_from_coeffs(omega_hat, grid, mean)
        theta = inverse_transform(SpectralCoeffs(grid, theta_hat), 'theta')
        omega = inverse_transform(SpectralCoeffs(grid, omega_hat), 'vorticity')
        history.append({'t': t, 'energy': kinetic_energy(u), 'theta_l2': theta.l2_norm(),
                        'omega_mean': omega.mean()})

    def shifted(base, k, factor):
        return (base[0] + factor * k[0], base[1] + factor * k[1],
                (base[2][0] + factor * k[2][0], base[2][1] + factor * k[2][1]))

    record(0.0)
    for step in range(1, n_steps + 1):
        speed = _velocity_from_coeffs(omega_hat, grid, mean).max_abs()
        if speed * h > cfl * grid.spacing:
            raise CFLViolation(f"max|u| * dt = {speed * h:.3e} exceeds {cfl:g} h in the Eulerian solver")
        y = (omega_hat, theta_hat, mean)
        k1 = _tendency(y[0], y[1], grid, y[2])
        y2 = shifted(y, k1, h / 2)
        k2 = _tendency(y2[0], y2[1], grid, y2[2])
        y3 = shifted(y, k2, h / 2)
        k3 = _tendency(y3[0], y3[1], grid, y3[2])
        y4 = shifted(y, k3, h)
        k4 = _tendency(y4[0], y4[1], grid, y4[2])
        omega_hat = omega_hat + (h / 6) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        theta_hat = theta_hat + (h / 6) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        mean = tuple(mean[i] + (h / 6) * (k1[2][i] + 2 * k2[2][i] + 2 * k3[2][i] + k4[2][i])
                     for i in range(2))
        if step == n_steps or (record_every and step % record_every == 0):
            record(step * h)

    state = EulerianState(inverse_transform(SpectralCoeffs(grid, omega_hat), 'vorticity'),
                          inverse_transform(SpectralCoeffs(grid, theta_hat), 'theta'), T, mean)
    return state, history


def solve_eulerian(u0: VectorField2, theta0: Optional[ScalarField], T: float,
                   dt: float) -> Tuple[VectorField2, ScalarField]:
    """(u(T), theta(T)) from the Eulerian reference solver"""
    state, history = integrate_eulerian(u0, theta0, T, dt)
    if history:
        logger.debug(f"Eulerian energy drift {history[-1]['energy'] - history[0]['energy']:.3e}")
    return velocity_from_vorticity(state.omega, state.mean_velocity), state.theta
