from .pressure import (
    buoyancy_pressure_term,
    buoyancy_pressure_term_riesz,
    compute_B,
    compute_B_unsplit,
    divergence_tendency,
    pressure_split_residual,
)
from .lagrangian import (
    div_diagnostic,
    eulerian_fields,
    fit_growth_rate,
    flow_map,
    flow_map_Psi,
    scaled_solution_map,
    solution_map_Phi,
    solution_map_with_flow,
    solve,
    solve_final,
    step_rk4,
    vector_field,
)
from .eulerian import (
    buoyancy_sign_check,
    integrate_eulerian,
    kinetic_energy,
    solve_eulerian,
    velocity_from_vorticity,
    velocity_tendency,
    vorticity_tendency,
)

__all__ = [
    'compute_B', 'compute_B_unsplit', 'pressure_split_residual', 'buoyancy_pressure_term',
    'buoyancy_pressure_term_riesz', 'divergence_tendency',
    'vector_field', 'step_rk4', 'solve', 'solve_final', 'solution_map_Phi',
    'solution_map_with_flow', 'flow_map_Psi', 'scaled_solution_map', 'flow_map',
    'div_diagnostic', 'fit_growth_rate', 'eulerian_fields',
    'velocity_from_vorticity', 'vorticity_tendency', 'velocity_tendency', 'buoyancy_sign_check',
    'integrate_eulerian', 'solve_eulerian', 'kinetic_energy',
]
