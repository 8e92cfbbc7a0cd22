"""Spectral differential operators on periodic fields."""
from typing import Optional, Tuple

from models import ScalarField, SpectralCoeffs, VectorField2
from spectral import (
    MultiplierSymbol,
    apply_multiplier,
    compose_symbols,
    dealias,
    forward_transform,
    inverse_transform,
)

_GRADIENT = (MultiplierSymbol.gradient(1), MultiplierSymbol.gradient(2))


def partial(field: ScalarField, k: int, role: Optional[str] = None) -> ScalarField:
    coeffs = apply_multiplier(forward_transform(field), _GRADIENT[k - 1])
    return inverse_transform(coeffs, role or f"d{k} {field.role}")


def gradient(field: ScalarField) -> VectorField2:
    coeffs = forward_transform(field)
    return VectorField2(
        inverse_transform(apply_multiplier(coeffs, _GRADIENT[0]), 'gradient'),
        inverse_transform(apply_multiplier(coeffs, _GRADIENT[1]), 'gradient'),
    )


def velocity_gradient(v: VectorField2) -> Tuple[Tuple[ScalarField, ScalarField],
                                                 Tuple[ScalarField, ScalarField]]:
    """Matrix of partials with entry [i][j] = d_j v_i"""
    rows = []
    for component in v.components:
        g = gradient(component)
        rows.append((g.u1, g.u2))
    return rows[0], rows[1]


def divergence(v: VectorField2) -> ScalarField:
    grid = v.grid
    c1 = forward_transform(v.u1).values
    c2 = forward_transform(v.u2).values
    values = c1 * _GRADIENT[0].evaluate(grid) + c2 * _GRADIENT[1].evaluate(grid)
    return inverse_transform(SpectralCoeffs(grid, values), 'div')


def curl(v: VectorField2) -> ScalarField:
    """Scalar curl d1 v2 - d2 v1"""
    grid = v.grid
    c1 = forward_transform(v.u1).values
    c2 = forward_transform(v.u2).values
    values = c2 * _GRADIENT[0].evaluate(grid) - c1 * _GRADIENT[1].evaluate(grid)
    return inverse_transform(SpectralCoeffs(grid, values), 'vorticity')


def make_divfree_from_stream(psi: ScalarField) -> VectorField2:
    """u = (-d2 psi, d1 psi)"""
    coeffs = forward_transform(psi)
    u1 = inverse_transform(apply_multiplier(coeffs, compose_symbols(_GRADIENT[1], scale=-1.0)),
                           'velocity')
    u2 = inverse_transform(apply_multiplier(coeffs, _GRADIENT[0]), 'velocity')
    return VectorField2(u1, u2)


def leray_project(v: VectorField2) -> VectorField2:
    """Remove the gradient part: P v = v - grad Delta^{-1} div v"""
    grid = v.grid
    c1 = forward_transform(v.u1).values
    c2 = forward_transform(v.u2).values
    g1 = _GRADIENT[0].evaluate(grid)
    g2 = _GRADIENT[1].evaluate(grid)
    potential = (g1 * c1 + g2 * c2) * MultiplierSymbol.inverse_laplacian().evaluate(grid)
    p1 = SpectralCoeffs(grid, c1 - g1 * potential)
    p2 = SpectralCoeffs(grid, c2 - g2 * potential)
    return VectorField2(inverse_transform(p1, v.u1.role), inverse_transform(p2, v.u2.role))


def advective_derivative(u: VectorField2, field: ScalarField) -> SpectralCoeffs:
    """Dealiased coefficients of (u . grad) field"""
    g = gradient(field)
    product = u.u1 * g.u1 + u.u2 * g.u2
    return dealias(forward_transform(product))


def advect_vector(u: VectorField2, v: VectorField2) -> Tuple[SpectralCoeffs, SpectralCoeffs]:
    """Dealiased coefficients of (u . grad) v, componentwise"""
    return advective_derivative(u, v.u1), advective_derivative(u, v.u2)


def dealiased_field(field: ScalarField) -> ScalarField:
    return inverse_transform(dealias(forward_transform(field)), field.role)
