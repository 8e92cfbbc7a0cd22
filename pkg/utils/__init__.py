from .presets import (
    PRESETS,
    bump_theta,
    build_datum,
    default_probe_point,
    gaussian_vortex,
    probe_direction,
    rest,
    shear,
    taylor_green,
)

__all__ = [
    'PRESETS', 'build_datum', 'default_probe_point', 'probe_direction',
    'rest', 'taylor_green', 'shear', 'gaussian_vortex', 'bump_theta',
]
