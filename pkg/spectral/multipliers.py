"""Fourier multipliers and Sobolev norms.

Every operator of the solver is a pointwise product in Fourier space with one
of the symbols below, or a composition of them.
"""
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np

from models import Grid2D, ScalarField, SpectralCoeffs, VectorField2
from spectral.transforms import forward_transform, inverse_transform

# |xi| <= 1 + BALL_TOLERANCE counts as inside the unit ball.
BALL_TOLERANCE = 1e-12


class SymbolKind(str, Enum):
    GRADIENT_1 = 'gradient_1'
    GRADIENT_2 = 'gradient_2'
    INVERSE_LAPLACIAN = 'inverse_laplacian'
    RIESZ_1 = 'riesz_1'
    RIESZ_2 = 'riesz_2'
    BALL_CUTOFF = 'ball_cutoff'
    BALL_CUTOFF_COMPLEMENT = 'ball_cutoff_complement'
    SOBOLEV_WEIGHT = 'sobolev_weight'


_ZERO_MEAN_KINDS = {SymbolKind.INVERSE_LAPLACIAN, SymbolKind.RIESZ_1, SymbolKind.RIESZ_2}


@dataclass(frozen=True)
class MultiplierSymbol:
    """A named Fourier symbol; ``s`` is only used by the Sobolev weight."""
    kind: SymbolKind
    s: float = 0.0

    @classmethod
    def gradient(cls, k: int) -> 'MultiplierSymbol':
        return cls(_indexed(k, SymbolKind.GRADIENT_1, SymbolKind.GRADIENT_2))

    @classmethod
    def riesz(cls, k: int) -> 'MultiplierSymbol':
        return cls(_indexed(k, SymbolKind.RIESZ_1, SymbolKind.RIESZ_2))

    @classmethod
    def inverse_laplacian(cls) -> 'MultiplierSymbol':
        return cls(SymbolKind.INVERSE_LAPLACIAN)

    @classmethod
    def ball_cutoff(cls) -> 'MultiplierSymbol':
        return cls(SymbolKind.BALL_CUTOFF)

    @classmethod
    def ball_cutoff_complement(cls) -> 'MultiplierSymbol':
        return cls(SymbolKind.BALL_CUTOFF_COMPLEMENT)

    @classmethod
    def sobolev_weight(cls, s: float) -> 'MultiplierSymbol':
        if s < 0:
            raise ValueError(f"Sobolev index must be non-negative, got {s}")
        return cls(SymbolKind.SOBOLEV_WEIGHT, float(s))

    @property
    def zero_mean(self) -> bool:
        return self.kind in _ZERO_MEAN_KINDS

    def evaluate(self, grid: Grid2D) -> np.ndarray:
        return _symbol_array(self, grid)


@dataclass(frozen=True)
class ComposedSymbol:
    """Product of symbols times a real constant"""
    factors: Tuple[MultiplierSymbol, ...]
    scale: float = 1.0

    @property
    def zero_mean(self) -> bool:
        return any(f.zero_mean for f in self.factors)

    def evaluate(self, grid: Grid2D) -> np.ndarray:
        return _symbol_array(self, grid)


Symbol = Union[MultiplierSymbol, ComposedSymbol]


def _indexed(k: int, first: SymbolKind, second: SymbolKind) -> SymbolKind:
    if k not in (1, 2):
        raise ValueError(f"Direction index must be 1 or 2, got {k}")
    return first if k == 1 else second


def compose_symbols(*symbols: Symbol, scale: float = 1.0) -> ComposedSymbol:
    """Flatten symbols into one product; applying it equals applying them in sequence."""
    factors = []
    for symbol in symbols:
        if isinstance(symbol, ComposedSymbol):
            factors.extend(symbol.factors)
            scale *= symbol.scale
        else:
            factors.append(symbol)
    return ComposedSymbol(tuple(factors), float(scale))


def riesz_pair_symbol(k: int, l: int) -> ComposedSymbol:
    """R_k R_l, which equals -Delta^{-1} d_k d_l on zero-mean fields"""
    return compose_symbols(MultiplierSymbol.riesz(k), MultiplierSymbol.riesz(l))


def _kind_array(kind: SymbolKind, s: float, grid: Grid2D) -> np.ndarray:
    odd1, odd2 = grid.xi_odd
    norm = grid.xi_norm
    nonzero = norm > 0

    if kind in (SymbolKind.GRADIENT_1, SymbolKind.GRADIENT_2):
        odd = odd1 if kind == SymbolKind.GRADIENT_1 else odd2
        return 1j * odd
    if kind == SymbolKind.INVERSE_LAPLACIAN:
        values = np.zeros_like(norm)
        values[nonzero] = -1.0 / norm[nonzero] ** 2
        return values
    if kind in (SymbolKind.RIESZ_1, SymbolKind.RIESZ_2):
        odd = odd1 if kind == SymbolKind.RIESZ_1 else odd2
        values = np.zeros(norm.shape, dtype=np.complex128)
        values[nonzero] = 1j * odd[nonzero] / norm[nonzero]
        return values
    ball = (norm <= 1.0 + BALL_TOLERANCE).astype(np.float64)
    if kind == SymbolKind.BALL_CUTOFF:
        return ball
    if kind == SymbolKind.BALL_CUTOFF_COMPLEMENT:
        return 1.0 - ball
    if kind == SymbolKind.SOBOLEV_WEIGHT:
        return (1.0 + norm ** 2) ** (s / 2.0)
    raise ValueError(f"Unknown symbol kind {kind}")


@lru_cache(maxsize=256)
def _symbol_array(symbol: Symbol, grid: Grid2D) -> np.ndarray:
    if isinstance(symbol, ComposedSymbol):
        values = np.full((grid.n, grid.n), symbol.scale, dtype=np.complex128)
        for factor in symbol.factors:
            values = values * _symbol_array(factor, grid)
        if not np.any(values.imag):
            values = values.real.copy()
    else:
        values = _kind_array(symbol.kind, symbol.s, grid)
    values.setflags(write=False)
    return values


def apply_multiplier(coeffs: SpectralCoeffs, symbol: Symbol) -> SpectralCoeffs:
    values = coeffs.values * symbol.evaluate(coeffs.grid)
    if symbol.zero_mean:
        values[0, 0] = 0.0
    return SpectralCoeffs(coeffs.grid, values)


def apply_to_field(field: ScalarField, symbol: Symbol,
                   role: Optional[str] = None) -> ScalarField:
    """Physical-space shortcut: inverse(symbol * forward(field))"""
    result = apply_multiplier(forward_transform(field), symbol)
    return inverse_transform(result, role or field.role)


def sobolev_norm(field: ScalarField, s: float) -> float:
    """H^s norm with weight (1+|xi|^2)^s, scaled so s=0 gives the grid L2 norm."""
    coeffs = forward_transform(field)
    weight = MultiplierSymbol.sobolev_weight(s).evaluate(field.grid)
    return float(field.grid.box_length * np.sqrt(np.sum((weight * np.abs(coeffs.values)) ** 2)))


def vector_sobolev_norm(field: VectorField2, s: float) -> float:
    """Maximum of the component norms"""
    return max(sobolev_norm(field.u1, s), sobolev_norm(field.u2, s))


def pair_sobolev_norm(u: VectorField2, theta: Optional[ScalarField], s: float) -> float:
    """Norm of a datum (u, theta) in H^s x H^s, again the maximum of the parts"""
    norm = vector_sobolev_norm(u, s)
    if theta is not None:
        norm = max(norm, sobolev_norm(theta, s))
    return norm


def field_sobolev_norm(field: Union[ScalarField, VectorField2], s: float) -> float:
    if isinstance(field, VectorField2):
        return vector_sobolev_norm(field, s)
    return sobolev_norm(field, s)


def relative_sobolev_error(approx: Union[ScalarField, VectorField2],
                           reference: Union[ScalarField, VectorField2], s: float) -> float:
    """||approx - reference||_s / ||reference||_s, absolute when the reference is zero"""
    error = field_sobolev_norm(approx - reference, s)
    scale = field_sobolev_norm(reference, s)
    return error / scale if scale > 0 else error
