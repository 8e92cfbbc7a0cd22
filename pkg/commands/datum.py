import logging
from typing import Tuple

from config import DatumSection, RunConfig
from errors import ConfigError
from models import Grid2D, ScalarField, VectorField2
from storage import LocalStorage
from utils.presets import build_datum

logger = logging.getLogger(__name__)


def run_grid(config: RunConfig) -> Grid2D:
    return Grid2D(config.grid.n, config.grid.box_length)


def load_custom_datum(section: DatumSection, grid: Grid2D) -> Tuple[VectorField2, ScalarField]:
    """Read u0 (and optionally theta0) dumps written by LocalStorage.store_field"""
    reader = LocalStorage('.')
    u0 = reader.load_field(section.u0_path)
    if not isinstance(u0, VectorField2):
        raise ConfigError(f"{section.u0_path} does not hold a vector field")
    theta0 = ScalarField.zeros(grid, 'theta')
    if section.theta0_path:
        theta0 = reader.load_field(section.theta0_path)
        if not isinstance(theta0, ScalarField):
            raise ConfigError(f"{section.theta0_path} does not hold a scalar field")
    if u0.grid != grid or theta0.grid != grid:
        raise ConfigError(f"Custom datum grid does not match n={grid.n}, L={grid.box_length}")
    return u0, theta0.with_role('theta')


def build_run_datum(config: RunConfig, grid: Grid2D = None) -> Tuple[VectorField2, ScalarField]:
    """The configured initial datum on ``grid`` (the run grid by default)"""
    grid = grid or run_grid(config)
    section = config.datum
    if section.preset == 'custom':
        return load_custom_datum(section, grid)
    logger.debug(f"Building preset '{section.preset}' on n={grid.n}")
    return build_datum(section.preset, grid, section.amplitude, section.theta_amplitude)
