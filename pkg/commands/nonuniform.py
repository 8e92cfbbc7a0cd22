import logging

from config import RunConfig
from errors import PropertyFailure
from experiments import (
    CSV_COLUMNS,
    ExperimentConfig,
    check_norm_equivalence,
    make_experiment_config,
    run_nonuniform,
)
from storage import LocalStorage
from utils.presets import build_datum, default_probe_point, probe_direction

from .datum import run_grid
from .simulate import solver_params

logger = logging.getLogger(__name__)


def build_experiment(config: RunConfig, name: str) -> ExperimentConfig:
    """Experiment around the preset ``name`` with the configured probe point and direction"""
    grid = run_grid(config)
    section = config.experiment
    u0, theta0 = build_datum(name, grid, config.datum.amplitude, config.datum.theta_amplitude)
    x_star = section.x_star or default_probe_point(grid)
    u_star = probe_direction(grid, x_star, section.u_star_width, section.u_star_amplitude)
    params = solver_params(config, dt=section.dt or config.solver.dt, save_every=0, diagnostics=False)
    return make_experiment_config(
        name, u0, theta0, u_star, x_star, section.R, section.n_list, params,
        support_scale=section.support_scale, auto_target_cells=section.auto_target_cells,
        epsilon=section.epsilon, threads=config.threads)


def cmd_nonuniform(config: RunConfig, storage: LocalStorage) -> int:
    """Run the experiment for every base datum; write nonuniform_<name>.csv and nonuniform.json.

    Raises:
        PropertyFailure: after both artifacts are written, if any base datum fails
            its summary (exit code 4).
    """
    results = {}
    failed = []
    for name in config.experiment.base_data:
        experiment = build_experiment(config, name)
        records, summary = run_nonuniform(experiment)
        storage.store_csv(CSV_COLUMNS, [r.csv_row() for r in records], f"nonuniform_{name}.csv")
        results[name] = {
            'summary': summary,
            'records': [r.to_dict() for r in records],
            'norm_equivalence': check_norm_equivalence(experiment, records),
        }
        for record in records:
            if not record.measured:
                logger.warning(f"[{name}] n={record.n} skipped: {record.status}")
        if summary['passed']:
            logger.info(f"[{name}] gap retention {summary['gap_retention']:.3f}, "
                        f"input slope {summary['slope_input']:.4f}")
        else:
            failed.append(name)
            logger.warning(f"[{name}] property check failed: retention={summary['gap_retention']}, "
                           f"slope={summary['slope_input']}, separation_ok={summary['separation_ok']}, "
                           f"supports_disjoint={summary['supports_disjoint']}, "
                           f"input_gap_drop={summary['input_gap_drop']}")
    storage.store_json(results, 'nonuniform.json')
    if failed:
        raise PropertyFailure(f"Non-uniform dependence not shown for {', '.join(failed)}")
    return 0
