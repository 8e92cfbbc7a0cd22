"""Composition, inversion and Jacobians of periodic diffeomorphisms phi = id + d."""
import logging

import numpy as np

from errors import DegenerateDiffeo, NoConvergence
from fields.calculus import velocity_gradient
from fields.interpolation import PeriodicSpline
from models import Diffeo, ScalarField, VectorField2

logger = logging.getLogger(__name__)


def displacement_gradient(phi: Diffeo) -> np.ndarray:
    """Pointwise (n, n, 2, 2) array with entry [..., i, j] = d_j d_i"""
    (a11, a12), (a21, a22) = velocity_gradient(phi.displacement)
    return np.stack([
        np.stack([a11.values, a12.values], axis=-1),
        np.stack([a21.values, a22.values], axis=-1),
    ], axis=-2)


def jacobian_det(phi: Diffeo) -> ScalarField:
    g = displacement_gradient(phi)
    det = (1.0 + g[..., 0, 0]) * (1.0 + g[..., 1, 1]) - g[..., 0, 1] * g[..., 1, 0]
    return ScalarField(phi.grid, det, 'det')


def gradient_operator_norm(phi: Diffeo) -> ScalarField:
    """Pointwise spectral norm of I + grad d"""
    jac = displacement_gradient(phi) + np.eye(2)
    return ScalarField(phi.grid, np.linalg.norm(jac, ord=2, axis=(-2, -1)), 'lipschitz')


def displacement_gradient_norm(phi: Diffeo) -> float:
    """max over the grid of the spectral norm of grad d"""
    if phi.is_identity():
        return 0.0
    return float(np.max(np.linalg.norm(displacement_gradient(phi), ord=2, axis=(-2, -1))))


def ensure_orientation(phi: Diffeo) -> ScalarField:
    """Return det(d phi), raising DegenerateDiffeo if it is not positive everywhere."""
    det = jacobian_det(phi)
    lowest = float(np.min(det.values))
    if lowest <= 0:
        raise DegenerateDiffeo(f"min det(d phi) = {lowest:.3e}")
    return det


def evaluate_diffeo(phi: Diffeo, points: np.ndarray) -> np.ndarray:
    """phi at arbitrary points (..., 2), unwrapped (not reduced into the box)"""
    points = np.asarray(points, dtype=np.float64)
    d1 = PeriodicSpline(phi.displacement.u1)(points)
    d2 = PeriodicSpline(phi.displacement.u2)(points)
    return points + np.stack([d1, d2], axis=-1)


def compose_scalar(theta: ScalarField, phi: Diffeo, check: bool = True) -> ScalarField:
    """theta o phi sampled at the grid nodes"""
    if check:
        ensure_orientation(phi)
    if phi.is_identity():
        return theta
    return ScalarField(theta.grid, PeriodicSpline(theta)(phi.positions), theta.role)


def compose_vector(v: VectorField2, phi: Diffeo, check: bool = True) -> VectorField2:
    if check:
        ensure_orientation(phi)
    return VectorField2(compose_scalar(v.u1, phi, check=False),
                        compose_scalar(v.u2, phi, check=False))


def compose_diffeos(outer: Diffeo, inner: Diffeo) -> Diffeo:
    """outer o inner, whose displacement is d_inner + d_outer o inner"""
    return Diffeo(inner.displacement + compose_vector(outer.displacement, inner, check=False))


def invert_diffeo(phi: Diffeo, tol: float = 1e-10, max_iters: int = 100) -> Diffeo:
    """Fixed-point inversion e <- -d(x + e), so that psi = id + e satisfies phi(psi(x)) = x.

    The iteration contracts while max |grad d| < 1.

    Raises:
        NoConvergence: if the residual at the nodes stays above ``tol``.
    """
    grid = phi.grid
    if phi.is_identity():
        return phi

    splines = (PeriodicSpline(phi.displacement.u1), PeriodicSpline(phi.displacement.u2))
    points = grid.points
    e = np.zeros((grid.n, grid.n, 2))
    residual = np.inf
    for iteration in range(1, max_iters + 1):
        target = points + e
        updated = -np.stack([splines[0](target), splines[1](target)], axis=-1)
        # |phi(x + e) - x| = |e + d(x + e)| for the previous iterate
        residual = float(np.max(np.abs(updated - e)))
        e = updated
        if not np.isfinite(residual):
            break
        if residual <= tol:
            logger.debug(f"Inverted diffeomorphism in {iteration} iterations (residual {residual:.2e})")
            return Diffeo(VectorField2.from_arrays(grid, e[..., 0], e[..., 1], 'displacement'))
    raise NoConvergence(f"Inversion residual {residual:.3e} after {max_iters} iterations")
