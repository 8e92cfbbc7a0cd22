"""Named initial data (u0, theta0) and probe directions on a grid.

Geometry is relative to the box so the same preset works on any grid.
"""
from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from fields import bump, gaussian, make_divfree_from_stream
from models import Grid2D, ScalarField, VectorField2

Datum = Tuple[VectorField2, ScalarField]


def _center(grid: Grid2D) -> Tuple[float, float]:
    return grid.box_length / 2, grid.box_length / 2


def rest(grid: Grid2D, amplitude: float = 0.0, theta_amplitude: float = 0.0) -> Datum:
    return VectorField2.zeros(grid, 'velocity'), ScalarField.zeros(grid, 'theta')


def taylor_green(grid: Grid2D, amplitude: float = 0.1, theta_amplitude: float = 0.0) -> Datum:
    """Steady Euler cell flow (sin k x1 cos k x2, -cos k x1 sin k x2)"""
    k = 2 * np.pi / grid.box_length
    u1 = ScalarField.from_function(grid, lambda x1, x2: amplitude * np.sin(k * x1) * np.cos(k * x2), 'velocity')
    u2 = ScalarField.from_function(grid, lambda x1, x2: -amplitude * np.cos(k * x1) * np.sin(k * x2), 'velocity')
    return VectorField2(u1, u2), ScalarField.zeros(grid, 'theta')


def shear(grid: Grid2D, amplitude: float = 0.1, theta_amplitude: float = 0.0) -> Datum:
    k = 2 * np.pi / grid.box_length
    u1 = ScalarField.from_function(grid, lambda x1, x2: amplitude * np.sin(k * x2), 'velocity')
    return VectorField2(u1, ScalarField.zeros(grid, 'velocity')), ScalarField.zeros(grid, 'theta')


def gaussian_vortex(grid: Grid2D, amplitude: float = 0.1, theta_amplitude: float = 0.0,
                    center: Sequence[float] = None) -> Datum:
    """Velocity of the stream function amplitude * w * exp(-|x - c|^2 / 2w^2), w = L/12"""
    width = grid.box_length / 12
    psi = gaussian(grid, center or _center(grid), width) * (amplitude * width)
    return make_divfree_from_stream(psi), ScalarField.zeros(grid, 'theta')


def bump_theta(grid: Grid2D, amplitude: float = 0.1, theta_amplitude: float = 0.05) -> Datum:
    """Gaussian vortex plus a warm bump of radius L/8 to the right of the centre"""
    L = grid.box_length
    u0, _ = gaussian_vortex(grid, amplitude)
    theta0 = bump((5 * L / 8, L / 2), L / 8, grid) * (theta_amplitude * np.e)
    return u0, theta0


PRESETS: Dict[str, Callable[..., Datum]] = {
    'rest': rest,
    'taylor_green': taylor_green,
    'shear': shear,
    'gaussian_vortex': gaussian_vortex,
    'bump_theta': bump_theta,
}


def build_datum(name: str, grid: Grid2D, amplitude: float = 0.1,
                theta_amplitude: float = 0.05) -> Datum:
    if name not in PRESETS:
        raise ValueError(f"Unknown preset '{name}'; choose from {sorted(PRESETS)}")
    return PRESETS[name](grid, amplitude, theta_amplitude)


def default_probe_point(grid: Grid2D) -> Tuple[float, float]:
    """(L/4, L/2), a grid node when n is divisible by 4"""
    return grid.box_length / 4, grid.box_length / 2


def probe_direction(grid: Grid2D, x_star: Sequence[float], width: float,
                    amplitude: float = 1.0) -> VectorField2:
    """Divergence-free field whose stream function peaks one width above x*.

    The offset makes u*(x*) = (-amplitude exp(-1/2), 0), so the direction moves x*.
    """
    width = min(width, grid.box_length / 12)
    center = (x_star[0], x_star[1] + width)
    return make_divfree_from_stream(gaussian(grid, center, width) * (amplitude * width))
