import logging

from config import RunConfig
from models import SolverParams
from solver import eulerian_fields, fit_growth_rate, solve
from storage import LocalStorage

from .datum import build_run_datum

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ['t', 'div_norm', 'u_norm_s', 'theta_norm_s', 'min_det']


def solver_params(config: RunConfig, **overrides) -> SolverParams:
    section = config.solver
    values = dict(dt=section.dt, T=section.T, s=section.s, inversion_tol=section.inversion_tol,
                  max_iters=section.max_iters, cfl=section.cfl,
                  blowup_threshold=section.blowup_threshold, save_every=section.save_every)
    values.update(overrides)
    return SolverParams(**values)


def cmd_simulate(config: RunConfig, storage: LocalStorage) -> int:
    """Solve the configured datum; write trajectory.csv, field dumps and summary.json.

    Returns 0 on success. Solver errors propagate with their exit code.
    """
    u0, theta0 = build_run_datum(config)
    params = solver_params(config)
    logger.info(f"Simulating preset '{config.datum.preset}' on n={config.grid.n}, T={params.T:g}")

    trajectory = solve(u0, theta0, params)
    rows = [[d[column] for column in TRAJECTORY_COLUMNS] for d in trajectory.diagnostics]
    storage.store_csv(TRAJECTORY_COLUMNS, rows, 'trajectory.csv')

    for index, state in enumerate(trajectory.states):
        u, theta, _ = eulerian_fields(state, trajectory.params)
        prefix = f"fields/save_{index:04d}"
        storage.store_field(u, f"{prefix}_u")
        storage.store_field(theta, f"{prefix}_theta")
        storage.store_field(state.phi, f"{prefix}_phi")

    final = trajectory.final
    u, theta, _ = eulerian_fields(final, trajectory.params)
    storage.store_field(u, 'u_final')
    storage.store_field(theta, 'theta_final')
    storage.store_field(final.phi, 'phi_final')

    last = trajectory.diagnostics[-1]
    summary = {
        'preset': config.datum.preset,
        'T': params.T,
        'n_steps': params.n_steps,
        'step_size': params.step_size,
        'saves': len(trajectory.times),
        'final': last,
        'max_div_ratio': max((d['div_norm'] / d['u_norm_l2'] if d['u_norm_l2'] > 0 else d['div_norm'])
                             for d in trajectory.diagnostics),
        'div_growth_rate': fit_growth_rate(trajectory.times, trajectory.series('div_norm')),
    }
    storage.store_json(summary, 'summary.json')
    logger.info(f"Finished at t={final.t:g}: min det={last['min_det']:.6f}, "
                f"||div u||={last['div_norm']:.3e}")
    return 0


__all__ = ['cmd_simulate', 'solver_params', 'TRAJECTORY_COLUMNS']
