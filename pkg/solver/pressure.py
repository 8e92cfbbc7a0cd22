"""Pressure terms of the Lagrangian momentum equation.

The velocity pressure gradient grad B(u) = grad Delta^{-1} sum_ij (.) is
evaluated with a low/high frequency split: the divergence form
d_i d_j (u_i u_j) inside the unit frequency ball and the gradient form
d_i u_j d_j u_i outside it. Both agree on divergence-free u.
"""
from typing import Optional

from fields import (
    advective_derivative,
    compose_scalar,
    compose_vector,
    divergence,
    invert_diffeo,
    velocity_gradient,
)
from models import Diffeo, ScalarField, SpectralCoeffs, VectorField2
from spectral import (
    MultiplierSymbol,
    apply_multiplier,
    compose_symbols,
    dealias,
    forward_transform,
    inverse_transform,
)

_GRADIENT = (MultiplierSymbol.gradient(1), MultiplierSymbol.gradient(2))
_INVERSE_LAPLACIAN = MultiplierSymbol.inverse_laplacian()
_BUOYANCY = tuple(
    compose_symbols(g, _GRADIENT[1], _INVERSE_LAPLACIAN, scale=-1.0) for g in _GRADIENT)


def divergence_form(u: VectorField2) -> SpectralCoeffs:
    """Dealiased coefficients of sum_ij d_i d_j (u_i u_j)"""
    grid = u.grid
    g1 = _GRADIENT[0].evaluate(grid)
    g2 = _GRADIENT[1].evaluate(grid)
    c11 = dealias(forward_transform(u.u1 * u.u1)).values
    c12 = dealias(forward_transform(u.u1 * u.u2)).values
    c22 = dealias(forward_transform(u.u2 * u.u2)).values
    return SpectralCoeffs(grid, g1 * g1 * c11 + 2.0 * g1 * g2 * c12 + g2 * g2 * c22)


def gradient_form(u: VectorField2) -> SpectralCoeffs:
    """Dealiased coefficients of sum_ij d_i u_j d_j u_i"""
    (a11, a12), (a21, a22) = velocity_gradient(u)
    source = a11 * a11 + a22 * a22 + 2.0 * (a12 * a21)
    return dealias(forward_transform(source))


def _gradient_of_inverse_laplacian(source: SpectralCoeffs, role: str) -> VectorField2:
    potential = apply_multiplier(source, _INVERSE_LAPLACIAN)
    return VectorField2(
        inverse_transform(apply_multiplier(potential, _GRADIENT[0]), role),
        inverse_transform(apply_multiplier(potential, _GRADIENT[1]), role),
    )


def compute_laplacian_B(u: VectorField2) -> SpectralCoeffs:
    """Coefficients of Delta B: divergence form inside the unit ball, gradient form outside"""
    grid = u.grid
    ball = MultiplierSymbol.ball_cutoff().evaluate(grid)
    complement = MultiplierSymbol.ball_cutoff_complement().evaluate(grid)
    source = ball * divergence_form(u).values + complement * gradient_form(u).values
    source[0, 0] = 0.0
    return SpectralCoeffs(grid, source)


def compute_B(u: VectorField2) -> VectorField2:
    """grad B(u) with the unit-ball split"""
    return _gradient_of_inverse_laplacian(compute_laplacian_B(u), 'pressure gradient')


def compute_B_unsplit(u: VectorField2) -> VectorField2:
    """grad B(u) from the gradient form alone, for checking the split"""
    return _gradient_of_inverse_laplacian(gradient_form(u), 'pressure gradient')


def pressure_split_residual(u: VectorField2) -> float:
    """max |split - unsplit| relative to max |unsplit|"""
    unsplit = compute_B_unsplit(u)
    scale = unsplit.max_abs()
    difference = (compute_B(u) - unsplit).max_abs()
    return difference / scale if scale > 0 else difference


def buoyancy_pressure_term(theta: ScalarField) -> VectorField2:
    """-grad Delta^{-1} d_2 theta, the pressure part of the buoyancy force"""
    coeffs = forward_transform(theta)
    return VectorField2(
        inverse_transform(apply_multiplier(coeffs, _BUOYANCY[0]), 'buoyancy pressure'),
        inverse_transform(apply_multiplier(coeffs, _BUOYANCY[1]), 'buoyancy pressure'),
    )


def buoyancy_pressure_term_riesz(theta0: ScalarField, phi: Diffeo,
                                 phi_inv: Optional[Diffeo] = None,
                                 tol: float = 1e-10, max_iters: int = 100) -> VectorField2:
    """Label-frame buoyancy pressure written as conjugated Riesz transforms.

    Evaluates [R_k(((R_2(theta0 o phi^-1)) o phi) o phi^-1)] o phi for k = 1, 2,
    which equals buoyancy_pressure_term(theta0 o phi^-1) o phi up to interpolation.
    """
    if phi_inv is None:
        phi_inv = invert_diffeo(phi, tol, max_iters)
    theta = compose_scalar(theta0, phi_inv, check=False)
    inner = inverse_transform(
        apply_multiplier(forward_transform(theta), MultiplierSymbol.riesz(2)), 'riesz')
    conjugated = compose_scalar(compose_scalar(inner, phi, check=False), phi_inv, check=False)
    coeffs = forward_transform(conjugated)
    outer = VectorField2(
        inverse_transform(apply_multiplier(coeffs, MultiplierSymbol.riesz(1)), 'buoyancy pressure'),
        inverse_transform(apply_multiplier(coeffs, MultiplierSymbol.riesz(2)), 'buoyancy pressure'),
    )
    return compose_vector(outer, phi, check=False)


def divergence_tendency(u: VectorField2) -> ScalarField:
    """Eulerian time derivative of div u under the split pressure.

    d_t div u = -(u . grad) div u - sum_ij d_i u_j d_j u_i + Delta B(u); the
    last two cancel when div u = 0, so a divergence-free datum stays so.
    """
    grid = u.grid
    transport = advective_derivative(u, divergence(u)).values
    source = compute_laplacian_B(u).values - gradient_form(u).values
    return inverse_transform(SpectralCoeffs(grid, source - transport), 'div tendency')


__all__ = [
    'compute_B', 'compute_B_unsplit', 'pressure_split_residual', 'divergence_form',
    'gradient_form', 'buoyancy_pressure_term', 'buoyancy_pressure_term_riesz',
    'divergence_tendency', 'compute_laplacian_B',
]
