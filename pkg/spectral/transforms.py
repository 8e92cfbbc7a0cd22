"""Forward/inverse discrete Fourier transforms on the periodic grid and the 2/3 rule."""
import numpy as np
from scipy import fft

from errors import SymmetryViolation
from models import ScalarField, SpectralCoeffs

# Largest imaginary residue accepted by the inverse transform, relative to the
# Frobenius norm of the complex result (taken as at least one, so cancellations
# down to roundoff are not flagged).
IMAG_TOLERANCE = 1e-12


def forward_transform(field: ScalarField) -> SpectralCoeffs:
    """Coefficients normalized so that the zero mode equals the box mean"""
    n = field.grid.n
    return SpectralCoeffs(field.grid, fft.fft2(field.values) / n ** 2)


def inverse_transform(coeffs: SpectralCoeffs, role: str = 'scalar',
                      tol: float = IMAG_TOLERANCE) -> ScalarField:
    """Synthesize a real field from conjugate-symmetric coefficients.

    Raises:
        SymmetryViolation: if the imaginary residue exceeds ``tol`` relative to
            the size of the result.
    """
    grid = coeffs.grid
    raw = fft.ifft2(coeffs.values) * grid.n ** 2
    residue = float(np.max(np.abs(raw.imag)))
    scale = max(float(np.linalg.norm(raw)), 1.0)
    if residue > tol * scale:
        raise SymmetryViolation(
            f"Imaginary residue {residue:.3e} exceeds {tol:.0e} x {scale:.3e} for '{role}'")
    return ScalarField(grid, raw.real, role)


def dealias(coeffs: SpectralCoeffs) -> SpectralCoeffs:
    """Zero every coefficient with |k_i| > n/3 in either direction"""
    return SpectralCoeffs(coeffs.grid, coeffs.values * coeffs.grid.dealias_mask)
