"""Compactly supported bumps, Sobolev normalization and periodic distances."""
from typing import Sequence

import numpy as np

from errors import UnresolvableBump, ZeroField
from models import Grid2D, ScalarField
from spectral import sobolev_norm

# Bumps narrower than this many grid cells are not represented.
MIN_BUMP_CELLS = 2.0


def periodic_offset(grid: Grid2D, points: np.ndarray, center: Sequence[float]) -> np.ndarray:
    """Minimal-image displacement points - center, shape (..., 2)"""
    L = grid.box_length
    delta = np.asarray(points, dtype=np.float64) - np.asarray(center, dtype=np.float64)
    return delta - L * np.round(delta / L)


def periodic_distance(grid: Grid2D, points: np.ndarray, center: Sequence[float]) -> np.ndarray:
    return np.linalg.norm(periodic_offset(grid, points, center), axis=-1)


def bump(center: Sequence[float], radius: float, grid: Grid2D, role: str = 'theta') -> ScalarField:
    """exp(-1/(1 - |x - c|^2 / rho^2)) inside the ball, zero outside; peak value e^{-1}."""
    if radius < MIN_BUMP_CELLS * grid.spacing:
        raise UnresolvableBump(
            f"Radius {radius:.4g} is below {MIN_BUMP_CELLS:g} grid cells ({grid.spacing:.4g} each)")
    q = (periodic_distance(grid, grid.points, center) / radius) ** 2
    values = np.zeros_like(q)
    inside = q < 1.0
    values[inside] = np.exp(-1.0 / (1.0 - q[inside]))
    return ScalarField(grid, values, role)


def normalize_hs(field: ScalarField, s: float, target: float) -> ScalarField:
    """Rescale so that ||field||_s equals target"""
    if target == 0:
        return ScalarField.zeros(field.grid, field.role)
    norm = sobolev_norm(field, s)
    if norm == 0:
        raise ZeroField(f"Cannot normalize the zero field '{field.role}'")
    return field * (target / norm)


def gaussian(grid: Grid2D, center: Sequence[float], width: float,
             role: str = 'stream') -> ScalarField:
    """exp(-|x - c|^2 / (2 width^2)) with minimal-image distance"""
    r = periodic_distance(grid, grid.points, center)
    return ScalarField(grid, np.exp(-0.5 * (r / width) ** 2), role)


def support_points(field: ScalarField) -> np.ndarray:
    """Grid nodes where the field is nonzero, as an (m, 2) array"""
    return field.grid.points[field.values != 0]
