from .transforms import dealias, forward_transform, inverse_transform
from .multipliers import (
    ComposedSymbol,
    MultiplierSymbol,
    SymbolKind,
    apply_multiplier,
    apply_to_field,
    compose_symbols,
    field_sobolev_norm,
    pair_sobolev_norm,
    relative_sobolev_error,
    riesz_pair_symbol,
    sobolev_norm,
    vector_sobolev_norm,
)

__all__ = [
    'forward_transform', 'inverse_transform', 'dealias',
    'MultiplierSymbol', 'ComposedSymbol', 'SymbolKind', 'compose_symbols', 'riesz_pair_symbol',
    'apply_multiplier', 'apply_to_field',
    'sobolev_norm', 'vector_sobolev_norm', 'pair_sobolev_norm', 'field_sobolev_norm',
    'relative_sobolev_error',
]
