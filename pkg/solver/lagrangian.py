"""Lagrangian-form integrator for the inviscid Boussinesq system.

The state is (phi, v) with v = u o phi. Its time derivative is

    d phi/dt = v
    d v/dt   = [grad B(u) + buoyancy pressure(theta)] o phi + (0, theta0)

with u = v o phi^-1 and theta = theta0 o phi^-1. The buoyancy label theta0 never
changes: temperature is carried by the flow map.
"""
import logging
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from errors import (
    BlowupDetected,
    CFLViolation,
    NotDivergenceFree,
)
from fields import (
    compose_scalar,
    compose_vector,
    displacement_gradient_norm,
    divergence,
    ensure_orientation,
    invert_diffeo,
    jacobian_det,
)
from models import (
    Diffeo,
    LagrangianState,
    ScalarField,
    SolverParams,
    Trajectory,
    VectorField2,
)
from solver.pressure import buoyancy_pressure_term, compute_B
from spectral import sobolev_norm, vector_sobolev_norm

logger = logging.getLogger(__name__)


def _theta_or_none(theta0: Optional[ScalarField]) -> Optional[ScalarField]:
    if theta0 is None or theta0.is_zero():
        return None
    return theta0


def eulerian_fields(state: LagrangianState, params: SolverParams
                    ) -> Tuple[VectorField2, ScalarField, Diffeo]:
    """Recover (u, theta, phi^-1) from a Lagrangian state"""
    phi_inv = invert_diffeo(state.phi, params.inversion_tol, params.max_iters)
    u = compose_vector(state.v, phi_inv, check=False)
    if params.theta0 is None:
        theta = ScalarField.zeros(state.grid, 'theta')
    else:
        theta = compose_scalar(params.theta0, phi_inv, check=False)
    return u, theta, phi_inv


def vector_field(state: LagrangianState, theta0: Optional[ScalarField],
                 params: Optional[SolverParams] = None) -> Tuple[VectorField2, VectorField2]:
    """Right-hand side (d phi/dt, dv/dt) of the Lagrangian system.

    Raises:
        DegenerateDiffeo: if det(d phi) <= 0 somewhere.
        NoConvergence: if phi cannot be inverted.
    """
    params = params or SolverParams()
    phi = state.phi
    ensure_orientation(phi)
    phi_inv = invert_diffeo(phi, params.inversion_tol, params.max_iters)
    u = compose_vector(state.v, phi_inv, check=False)
    force = compute_B(u)

    theta0 = _theta_or_none(theta0)
    if theta0 is not None:
        theta = compose_scalar(theta0, phi_inv, check=False)
        force = force + buoyancy_pressure_term(theta)

    acceleration = compose_vector(force, phi, check=False)
    if theta0 is not None:
        acceleration = VectorField2(acceleration.u1, acceleration.u2 + theta0)
    return state.v, acceleration


def _check_cfl(state: LagrangianState, dt: float, params: SolverParams):
    speed = state.v.max_abs()
    limit = params.cfl * state.grid.spacing
    if speed * dt > limit:
        raise CFLViolation(
            f"max|v| * dt = {speed * dt:.3e} exceeds {params.cfl:g} h = {limit:.3e} at t={state.t:.4g}")


def _check_blowup(state: LagrangianState, params: SolverParams):
    gradient_norm = displacement_gradient_norm(state.phi)
    if gradient_norm >= params.blowup_threshold:
        raise BlowupDetected(
            f"max |grad d| = {gradient_norm:.3f} >= {params.blowup_threshold} at t={state.t:.4g}")
    if not state.phi.is_identity():
        lowest = float(np.min(jacobian_det(state.phi).values))
        if lowest <= 0:
            raise BlowupDetected(f"min det(d phi) = {lowest:.3e} at t={state.t:.4g}")


def step_rk4(state: LagrangianState, params: SolverParams,
             dt: Optional[float] = None) -> LagrangianState:
    """One classical Runge-Kutta step of (d, v) with the buoyancy label params.theta0"""
    dt = params.dt if dt is None else dt
    _check_cfl(state, dt, params)

    def rhs(d: VectorField2, v: VectorField2) -> Tuple[VectorField2, VectorField2]:
        return vector_field(LagrangianState(Diffeo(d), v, state.t), params.theta0, params)

    d0 = state.phi.displacement
    v0 = state.v
    k1d, k1v = rhs(d0, v0)
    k2d, k2v = rhs(d0 + k1d * (dt / 2), v0 + k1v * (dt / 2))
    k3d, k3v = rhs(d0 + k2d * (dt / 2), v0 + k2v * (dt / 2))
    k4d, k4v = rhs(d0 + k3d * dt, v0 + k3v * dt)

    d = d0 + (k1d + 2.0 * k2d + 2.0 * k3d + k4d) * (dt / 6)
    v = v0 + (k1v + 2.0 * k2v + 2.0 * k3v + k4v) * (dt / 6)
    return LagrangianState(Diffeo(d), v, state.t + dt)


def diagnose(state: LagrangianState, params: SolverParams) -> dict:
    """Per-save diagnostics of a Lagrangian state"""
    u, theta, _ = eulerian_fields(state, params)
    transport_residual = 0.0
    if params.theta0 is not None:
        transported = compose_scalar(theta, state.phi, check=False)
        transport_residual = (transported - params.theta0).l2_norm()
    return {
        't': state.t,
        'div_norm': divergence(u).l2_norm(),
        'u_norm_l2': u.l2_norm(),
        'u_norm_s': vector_sobolev_norm(u, params.s),
        'theta_norm_s': sobolev_norm(theta, params.s),
        'min_det': float(np.min(jacobian_det(state.phi).values)),
        'energy': 0.5 * u.l2_norm() ** 2,
        'transport_residual': transport_residual,
    }


def _check_initial_data(u0: VectorField2, params: SolverParams):
    if not params.require_divfree:
        return
    div_norm = divergence(u0).l2_norm()
    if div_norm > params.divergence_tol * max(1.0, u0.l2_norm()):
        raise NotDivergenceFree(f"||div u0|| = {div_norm:.3e} exceeds {params.divergence_tol:.0e}")


def solve(u0: VectorField2, theta0: Optional[ScalarField],
          params: SolverParams) -> Trajectory:
    """Integrate from (id, u0) to params.T.

    Saves the initial state, every ``params.save_every`` steps and the final
    state.

    Raises:
        BlowupDetected: if max |grad d| reaches the blow-up threshold or det(d phi) <= 0.
        CFLViolation: if max|v| dt exceeds the CFL fraction of the grid spacing.
    """
    if theta0 is not None and theta0.grid != u0.grid:
        raise ValueError("u0 and theta0 live on different grids")
    params = params.with_theta0(_theta_or_none(theta0))
    _check_initial_data(u0, params)

    state = LagrangianState(Diffeo.identity(u0.grid), u0, 0.0)
    trajectory = Trajectory(params=params)
    trajectory.append(state, diagnose(state, params) if params.diagnostics else None)

    n_steps = params.n_steps
    dt = params.step_size
    logger.info(f"Solving to T={params.T:g} in {n_steps} steps of {dt:.4g} on n={u0.grid.n}")
    for step in range(1, n_steps + 1):
        state = step_rk4(state, params, dt)
        if step == n_steps:
            state = replace(state, t=params.T)
        _check_blowup(state, params)
        if step == n_steps or (params.save_every and step % params.save_every == 0):
            trajectory.append(state, diagnose(state, params) if params.diagnostics else None)
            logger.debug(f"Saved state at t={state.t:.4g}")
    return trajectory


def solve_final(u0: VectorField2, theta0: Optional[ScalarField],
                params: SolverParams) -> LagrangianState:
    """Final state only, without intermediate saves or diagnostics"""
    quiet = replace(params, save_every=0, diagnostics=False)
    return solve(u0, theta0, quiet).final


def solution_map_with_flow(u0: VectorField2, theta0: Optional[ScalarField],
                           params: SolverParams
                           ) -> Tuple[VectorField2, ScalarField, Diffeo, Diffeo]:
    """(u(T), theta(T), phi(T), phi(T)^-1)"""
    grid = u0.grid
    final = solve_final(u0, theta0, params)
    active = params.with_theta0(_theta_or_none(theta0))
    u, theta, phi_inv = eulerian_fields(final, active)
    if theta0 is not None and active.theta0 is None:
        theta = ScalarField.zeros(grid, theta0.role)
    return u, theta, final.phi, phi_inv


def solution_map_Phi(u0: VectorField2, theta0: Optional[ScalarField],
                     params: SolverParams) -> Tuple[VectorField2, ScalarField]:
    """Data-to-solution map (u0, theta0) -> (u(T), theta(T))"""
    u, theta, _, _ = solution_map_with_flow(u0, theta0, params)
    return u, theta


def flow_map_Psi(u0: VectorField2, theta0: Optional[ScalarField],
                 params: SolverParams) -> Diffeo:
    """(u0, theta0) -> phi(T)"""
    return solve_final(u0, theta0, params).phi


def scaled_solution_map(u0: VectorField2, theta0: Optional[ScalarField], T: float,
                        params: SolverParams) -> Tuple[VectorField2, ScalarField]:
    """Phi_T via the unit-horizon map: solve (T u0, T^2 theta0) to time 1 and rescale.

    The step is scaled with the horizon (dt/T), so the step count matches a
    direct solve to T. For T < dt that is a single step.
    """
    if not T > 0:
        raise ValueError(f"Horizon must be positive, got {T}")
    unit = params.with_horizon(1.0, min(params.dt / T, 1.0))
    scaled_theta = None if theta0 is None else theta0 * T ** 2
    u1, theta1 = solution_map_Phi(u0 * T, scaled_theta, unit)
    return u1 / T, theta1 / T ** 2


def flow_map(trajectory: Trajectory, t: float, tol: float = 1e-12) -> Diffeo:
    """Psi^t: phi at a saved time t"""
    for saved_t, state in zip(trajectory.times, trajectory.states):
        if abs(saved_t - t) <= tol * max(1.0, abs(t)):
            return state.phi
    raise ValueError(f"t={t} is not a save time of this trajectory")


def div_diagnostic(trajectory: Trajectory) -> List[float]:
    """||div(v o phi^-1)||_L2 at each save time"""
    values = []
    for state in trajectory.states:
        u, _, _ = eulerian_fields(state, trajectory.params)
        values.append(divergence(u).l2_norm())
    return values


def fit_growth_rate(times: Sequence[float], series: Sequence[float]) -> float:
    """Rate C in ||div u(t)||^2 ~ A exp(C t), fitted by least squares on the log"""
    times = np.asarray(times, dtype=np.float64)
    squares = np.asarray(series, dtype=np.float64) ** 2
    positive = squares > 0
    if np.count_nonzero(positive) < 2:
        return 0.0
    slope, _ = np.polyfit(times[positive], np.log(squares[positive]), 1)
    return float(slope)
