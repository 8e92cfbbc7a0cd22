import logging
from typing import List, Optional

from config import RunConfig
from experiments import ValidationContext, raise_on_failure, run_validation
from storage import LocalStorage
from utils.presets import gaussian_vortex

from .datum import build_run_datum, run_grid
from .simulate import solver_params

logger = logging.getLogger(__name__)


def build_context(config: RunConfig) -> ValidationContext:
    section = config.validation
    amplitude = config.datum.amplitude
    return ValidationContext(
        grid=run_grid(config),
        params=solver_params(config, save_every=0),
        datum_factory=lambda grid: build_run_datum(config, grid),
        euler_factory=lambda grid: gaussian_vortex(grid, amplitude),
        lambdas=list(section.lambdas),
        phi_T=section.phi_T,
        euler_T=section.euler_T,
        conservation_T=section.conservation_T,
        random_fields=section.random_fields,
        refinement=section.refinement,
        seed=section.seed,
    )


def cmd_validate(config: RunConfig, storage: LocalStorage, checks: Optional[List[str]] = None) -> int:
    """Run the invariant suite and write validation.json.

    A failed check raises after the report is written: SolverError (exit 3)
    when a check hit a solver failure, PropertyFailure (exit 4) otherwise.
    """
    names = checks or config.validation.checks
    results = run_validation(build_context(config), names)
    passed = all(r.passed for r in results)
    storage.store_json({'passed': passed, 'checks': [r.to_dict() for r in results]}, 'validation.json')
    raise_on_failure(results)
    logger.info(f"All {len(results)} checks passed")
    return 0
