from .interpolation import PeriodicSpline, eval_fourier, eval_offgrid
from .calculus import (
    advect_vector,
    advective_derivative,
    curl,
    dealiased_field,
    divergence,
    gradient,
    leray_project,
    make_divfree_from_stream,
    partial,
    velocity_gradient,
)
from .diffeo import (
    compose_diffeos,
    compose_scalar,
    compose_vector,
    displacement_gradient,
    displacement_gradient_norm,
    ensure_orientation,
    evaluate_diffeo,
    gradient_operator_norm,
    invert_diffeo,
    jacobian_det,
)
from .construct import bump, gaussian, normalize_hs, periodic_distance, periodic_offset, support_points

__all__ = [
    'PeriodicSpline', 'eval_offgrid', 'eval_fourier',
    'partial', 'gradient', 'velocity_gradient', 'divergence', 'curl', 'make_divfree_from_stream',
    'leray_project', 'advective_derivative', 'advect_vector', 'dealiased_field',
    'compose_scalar', 'compose_vector', 'compose_diffeos', 'invert_diffeo', 'evaluate_diffeo',
    'jacobian_det', 'displacement_gradient', 'displacement_gradient_norm', 'gradient_operator_norm',
    'ensure_orientation',
    'bump', 'normalize_hs', 'gaussian', 'periodic_offset', 'periodic_distance', 'support_points',
]
