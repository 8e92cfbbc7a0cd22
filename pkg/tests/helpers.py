"""Field builders shared by the test modules."""
import numpy as np

from fields import dealiased_field, make_divfree_from_stream
from models import Grid2D, ScalarField, VectorField2


def random_smooth(grid: Grid2D, rng: np.random.Generator, role: str = 'random') -> ScalarField:
    """Zero-mean noise restricted to the retained (|k| <= n/3) modes"""
    noise = dealiased_field(ScalarField(grid, rng.standard_normal((grid.n, grid.n)), role))
    return ScalarField(grid, noise.values - noise.mean(), role)


def random_divfree(grid: Grid2D, rng: np.random.Generator, amplitude: float = 1.0) -> VectorField2:
    u = make_divfree_from_stream(random_smooth(grid, rng, 'stream'))
    return u * (amplitude / u.max_abs())


def taylor_green_velocity(grid: Grid2D, amplitude: float = 1.0) -> VectorField2:
    """(a sin x1 cos x2, -a cos x1 sin x2) on the 2 pi box"""
    u1 = ScalarField.from_function(grid, lambda x1, x2: amplitude * np.sin(x1) * np.cos(x2), 'velocity')
    u2 = ScalarField.from_function(grid, lambda x1, x2: -amplitude * np.cos(x1) * np.sin(x2), 'velocity')
    return VectorField2(u1, u2)


def scalar(grid: Grid2D, function, role: str = 'scalar') -> ScalarField:
    return ScalarField.from_function(grid, function, role)
