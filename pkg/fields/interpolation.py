"""Off-grid evaluation of periodic fields."""
import numpy as np
from scipy import ndimage

from models import ScalarField
from spectral.transforms import forward_transform


class PeriodicSpline:
    """Periodic bicubic spline interpolant of a scalar field.

    The spline coefficients are computed once, so evaluating many point sets
    against the same field costs one prefilter.
    """

    def __init__(self, field: ScalarField):
        self.grid = field.grid
        self._coefficients = ndimage.spline_filter(
            field.values, order=3, mode='grid-wrap', output=np.float64)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an array of points with shape (..., 2)"""
        points = np.asarray(points, dtype=np.float64)
        if points.shape[-1] != 2:
            raise ValueError(f"Points must have a trailing axis of length 2, got {points.shape}")
        if not np.all(np.isfinite(points)):
            raise ValueError("Interpolation points must be finite")
        flat = points.reshape(-1, 2)
        coords = np.mod(flat, self.grid.box_length).T / self.grid.spacing
        values = ndimage.map_coordinates(
            self._coefficients, coords, order=3, mode='grid-wrap', prefilter=False)
        return values.reshape(points.shape[:-1])


def eval_offgrid(field: ScalarField, points: np.ndarray) -> np.ndarray:
    return PeriodicSpline(field)(points)


def eval_fourier(field: ScalarField, points: np.ndarray) -> np.ndarray:
    """Exact trigonometric interpolant by direct summation.

    O(n^2) work per point; used to verify the spline on small grids.
    """
    points = np.asarray(points, dtype=np.float64)
    flat = points.reshape(-1, 2)
    coeffs = forward_transform(field).values
    freq = field.grid.frequencies
    phase1 = np.exp(1j * np.outer(flat[:, 0], freq))
    phase2 = np.exp(1j * np.outer(flat[:, 1], freq))
    values = np.einsum('mi,ij,mj->m', phase1, coeffs, phase2).real
    return values.reshape(points.shape[:-1])
