"""Identity checks on the solution map: time scaling and the derivative at rest."""
import logging
from typing import Dict, Optional

from models import ScalarField, SolverParams, VectorField2
from solver import flow_map_Psi, scaled_solution_map, solution_map_Phi
from spectral import field_sobolev_norm, relative_sobolev_error

logger = logging.getLogger(__name__)

# Below this relative size the epsilon dependence of a difference quotient is noise.
RICHARDSON_NOISE_FLOOR = 1e-10


def _scaled(theta: Optional[ScalarField], factor: float) -> Optional[ScalarField]:
    return None if theta is None else theta * factor


def _pair_error(u: VectorField2, theta: ScalarField, u_ref: VectorField2,
                theta_ref: ScalarField, s: float) -> float:
    return max(relative_sobolev_error(u, u_ref, s), relative_sobolev_error(theta, theta_ref, s))


def check_scaling(u0: VectorField2, theta0: Optional[ScalarField], T: float, lam: float,
                  params: SolverParams) -> Dict[str, float]:
    """Residuals of u_lam(t) = lam u(lam t), theta_lam(t) = lam^2 theta(lam t).

    state_residual compares Phi_T(u0, theta0) against the solution of
    (lam u0, lam^2 theta0) at T/lam, rescaled. phi_T_residual compares the
    direct Phi_T against the unit-horizon route (T u0, T^2 theta0) -> time 1.
    """
    s = params.s
    direct_u, direct_theta = solution_map_Phi(u0, theta0, params.with_horizon(T))

    scaled_params = params.with_horizon(T / lam, params.dt / lam)
    lam_u, lam_theta = solution_map_Phi(u0 * lam, _scaled(theta0, lam ** 2), scaled_params)
    state_residual = _pair_error(lam_u / lam, lam_theta / lam ** 2, direct_u, direct_theta, s)

    unit_u, unit_theta = scaled_solution_map(u0, theta0, T, params)
    phi_residual = _pair_error(unit_u, unit_theta, direct_u, direct_theta, s)

    logger.info(f"Scaling lambda={lam:g}: state {state_residual:.2e}, Phi_T {phi_residual:.2e}")
    return {'lambda': lam, 'T': T, 'state_residual': state_residual, 'phi_T_residual': phi_residual}


def derivative_at_rest(u0: VectorField2, params: SolverParams, epsilon: float) -> VectorField2:
    """(Psi(eps u0, 0) - Psi(-eps u0, 0)) / (2 eps) as a displacement field"""
    plus = flow_map_Psi(u0 * epsilon, None, params).displacement
    minus = flow_map_Psi(u0 * -epsilon, None, params).displacement
    return (plus - minus) / (2 * epsilon)


def derivative_identity_report(u0: VectorField2, params: SolverParams,
                               epsilon: float = 1e-4) -> Dict[str, float]:
    """Compare the difference quotient of Psi at (0, 0) along (u0, 0) with T u0.

    The Richardson ratio |D(eps) - D(eps/2)| / |D(eps/2) - D(eps/4)| is near 4 for a
    second-order central difference.
    """
    s = params.s
    target = u0 * params.T
    quotients = [derivative_at_rest(u0, params, epsilon / 2 ** k) for k in range(3)]
    error = relative_sobolev_error(quotients[0], target, s)

    scale = field_sobolev_norm(target, s)
    coarse = field_sobolev_norm(quotients[0] - quotients[1], s)
    fine = field_sobolev_norm(quotients[1] - quotients[2], s)
    below_noise = max(coarse, fine) <= RICHARDSON_NOISE_FLOOR * scale
    ratio = coarse / fine if fine > 0 else None
    consistent = below_noise or (ratio is not None and 2.0 <= ratio <= 8.0)
    return {
        'epsilon': epsilon,
        'relative_error': error,
        'richardson_ratio': ratio,
        'richardson_below_noise': below_noise,
        'richardson_consistent': consistent,
    }
