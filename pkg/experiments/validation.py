"""Invariant suite behind the ``validate`` command.

Each check returns CheckResult records with the measured value and its
tolerance; solver failures inside a check are recorded, not raised.
"""
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from errors import BoussinesqError, ConfigError, PropertyFailure, SolverError
from experiments.checks import check_scaling, derivative_identity_report
from fields import (
    compose_scalar,
    compose_vector,
    dealiased_field,
    invert_diffeo,
    make_divfree_from_stream,
)
from models import Grid2D, ScalarField, SolverParams, SpectralCoeffs, VectorField2
from solver import (
    buoyancy_pressure_term,
    buoyancy_pressure_term_riesz,
    buoyancy_sign_check,
    flow_map_Psi,
    pressure_split_residual,
    solution_map_Phi,
    solve,
    solve_eulerian,
)
from spectral import (
    MultiplierSymbol,
    apply_multiplier,
    forward_transform,
    inverse_transform,
    relative_sobolev_error,
    riesz_pair_symbol,
)

logger = logging.getLogger(__name__)

# The rest state must survive this many steps unchanged.
STATIONARY_STEPS = 1000

Datum = Tuple[VectorField2, ScalarField]


@dataclass
class CheckResult:
    name: str
    value: Optional[float]
    tolerance: Optional[float]
    passed: bool
    details: dict = field(default_factory=dict)
    error: Optional[str] = None
    solver_failure: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ValidationContext:
    """Everything a check needs; ``datum_factory`` rebuilds data on a refined or coarsened grid."""
    grid: Grid2D
    params: SolverParams
    datum_factory: Callable[[Grid2D], Datum]
    euler_factory: Callable[[Grid2D], Datum]
    lambdas: List[float] = field(default_factory=lambda: [0.5, 2.0])
    phi_T: float = 0.5
    euler_T: float = 0.5
    conservation_T: float = 1.0
    random_fields: int = 20
    refinement: bool = True
    seed: int = 0
    cache: dict = field(default_factory=dict)

    @property
    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def _random_field(grid: Grid2D, rng: np.random.Generator, role: str = 'random') -> ScalarField:
    """Dealiased Gaussian noise with zero mean"""
    noise = dealiased_field(ScalarField(grid, rng.standard_normal((grid.n, grid.n)), role))
    return ScalarField(grid, noise.values - noise.mean(), role)


def check_spectral_round_trip(ctx: ValidationContext) -> List[CheckResult]:
    f = ScalarField(ctx.grid, ctx.rng.standard_normal((ctx.grid.n, ctx.grid.n)))
    back = inverse_transform(forward_transform(f))
    error = (back - f).max_abs() / f.max_abs()
    return [CheckResult('spectral_round_trip', error, 1e-12, error <= 1e-12)]


def check_riesz_identity(ctx: ValidationContext) -> List[CheckResult]:
    f = _random_field(ctx.grid, ctx.rng)
    coeffs = forward_transform(f)
    total = (apply_multiplier(coeffs, riesz_pair_symbol(1, 1)).values
             + apply_multiplier(coeffs, riesz_pair_symbol(2, 2)).values)
    residual = inverse_transform(SpectralCoeffs(ctx.grid, total)) + f
    error = residual.max_abs() / f.max_abs()
    return [CheckResult('riesz_identity', error, 1e-12, error <= 1e-12)]


def check_ball_partition(ctx: ValidationContext) -> List[CheckResult]:
    coeffs = forward_transform(_random_field(ctx.grid, ctx.rng))
    inside = apply_multiplier(coeffs, MultiplierSymbol.ball_cutoff()).values
    outside = apply_multiplier(coeffs, MultiplierSymbol.ball_cutoff_complement()).values
    error = float(np.max(np.abs(inside + outside - coeffs.values)))
    return [CheckResult('ball_partition', error, 0.0, error == 0.0)]


def check_pressure_split(ctx: ValidationContext) -> List[CheckResult]:
    rng = ctx.rng
    residuals = [pressure_split_residual(make_divfree_from_stream(_random_field(ctx.grid, rng)))
                 for _ in range(ctx.random_fields)]
    worst = max(residuals)
    return [CheckResult('pressure_split', worst, 1e-12, worst <= 1e-12,
                        {'fields': ctx.random_fields})]


def check_buoyancy_riesz_route(ctx: ValidationContext) -> List[CheckResult]:
    """Conjugated-Riesz buoyancy pressure against the one-pass multiplier, under the vortex flow"""
    grid = ctx.grid
    u0, _ = ctx.euler_factory(grid)
    _, theta0 = ctx.datum_factory(grid)
    if theta0 is None or theta0.is_zero():
        k = 2 * np.pi / grid.box_length
        theta0 = ScalarField.from_function(
            grid, lambda x1, x2: np.cos(k * x1) + 0.5 * np.sin(k * (x1 + x2)), 'theta')
    phi = flow_map_Psi(u0, None, replace(ctx.params, T=ctx.phi_T, save_every=0, diagnostics=False))
    phi_inv = invert_diffeo(phi, ctx.params.inversion_tol, ctx.params.max_iters)
    riesz = buoyancy_pressure_term_riesz(theta0, phi, phi_inv)
    direct = compose_vector(buoyancy_pressure_term(compose_scalar(theta0, phi_inv, check=False)), phi,
                            check=False)
    error = (riesz - direct).max_abs() / max(direct.max_abs(), 1e-300)
    return [CheckResult('buoyancy_riesz_route', error, 1e-4, error <= 1e-4,
                        {'displacement': phi.displacement.max_abs()})]


def _standard_trajectory(ctx: ValidationContext):
    if 'trajectory' not in ctx.cache:
        u0, theta0 = ctx.datum_factory(ctx.grid)
        n_steps = replace(ctx.params, T=ctx.conservation_T).n_steps
        params = replace(ctx.params, T=ctx.conservation_T, save_every=max(1, n_steps // 10),
                         diagnostics=True)
        ctx.cache['trajectory'] = (solve(u0, theta0, params), theta0)
    return ctx.cache['trajectory']


def check_divergence_preservation(ctx: ValidationContext) -> List[CheckResult]:
    trajectory, _ = _standard_trajectory(ctx)
    div = trajectory.series('div_norm')
    size = trajectory.series('u_norm_l2')
    ratios = np.where(size > 0, div / np.where(size > 0, size, 1.0), div)
    worst = float(np.max(ratios))
    return [CheckResult('divergence_preservation', worst, 1e-6, worst <= 1e-6,
                        {'T': ctx.conservation_T, 'saves': len(trajectory.times)})]


def check_transport_identity(ctx: ValidationContext) -> List[CheckResult]:
    trajectory, theta0 = _standard_trajectory(ctx)
    scale = theta0.l2_norm()
    worst = float(np.max(trajectory.series('transport_residual')))
    value = worst / scale if scale > 0 else worst
    return [CheckResult('transport_identity', value, 1e-4, value <= 1e-4, {'T': ctx.conservation_T})]


def _euler_error(ctx: ValidationContext, grid: Grid2D) -> float:
    u0, _ = ctx.euler_factory(grid)
    params = replace(ctx.params, T=ctx.euler_T)
    u_lagrangian, _ = solution_map_Phi(u0, None, params)
    u_eulerian, _ = solve_eulerian(u0, None, ctx.euler_T, params.step_size)
    return relative_sobolev_error(u_lagrangian, u_eulerian, 1.0)


def check_euler_reduction(ctx: ValidationContext) -> List[CheckResult]:
    error = _euler_error(ctx, ctx.grid)
    details = {'T': ctx.euler_T, 'n': ctx.grid.n}
    passed = error <= 1e-2
    if ctx.refinement:
        coarse = Grid2D(ctx.grid.n // 2, ctx.grid.box_length)
        coarse_error = _euler_error(ctx, coarse)
        order = math.log2(coarse_error / error) if error > 0 and coarse_error > 0 else None
        details.update({'coarse_n': coarse.n, 'coarse_error': coarse_error, 'order': order})
        passed = passed and (order is None or order > 0)
    return [CheckResult('euler_reduction', error, 1e-2, passed, details)]


def check_scaling_identity(ctx: ValidationContext) -> List[CheckResult]:
    u0, theta0 = ctx.datum_factory(ctx.grid)
    results = []
    for lam in ctx.lambdas:
        report = check_scaling(u0, theta0, ctx.phi_T, lam, ctx.params)
        passed = report['state_residual'] <= 1e-6 and report['phi_T_residual'] <= 1e-5
        results.append(CheckResult(f"scaling[lambda={lam:g}]", report['state_residual'], 1e-6,
                                   passed, report))
    return results


def check_derivative_identity(ctx: ValidationContext) -> List[CheckResult]:
    u0, _ = ctx.euler_factory(ctx.grid)
    report = derivative_identity_report(u0, replace(ctx.params, T=1.0))
    passed = report['relative_error'] <= 1e-3 and report['richardson_consistent']
    return [CheckResult('derivative_identity', report['relative_error'], 1e-3, passed, report)]


def check_buoyancy_sign(ctx: ValidationContext) -> List[CheckResult]:
    u0, theta0 = ctx.datum_factory(ctx.grid)
    report = buoyancy_sign_check(u0, theta0)
    passed = report['sign'] == 1.0 and report['mismatch_plus'] <= 1e-8
    return [CheckResult('buoyancy_sign', report['mismatch_plus'], 1e-8, passed, report)]


def check_stationarity(ctx: ValidationContext) -> List[CheckResult]:
    rest = VectorField2.zeros(ctx.grid, 'velocity')
    params = replace(ctx.params, T=STATIONARY_STEPS * ctx.params.dt, diagnostics=False, save_every=0)
    final = solve(rest, None, params).final
    deviation = max(final.phi.displacement.max_abs(), final.v.max_abs())
    return [CheckResult('stationarity', deviation, 1e-13, deviation <= 1e-13, {'steps': params.n_steps})]


CHECKS: Dict[str, Callable[[ValidationContext], List[CheckResult]]] = {
    'spectral_round_trip': check_spectral_round_trip,
    'riesz_identity': check_riesz_identity,
    'ball_partition': check_ball_partition,
    'pressure_split': check_pressure_split,
    'buoyancy_riesz_route': check_buoyancy_riesz_route,
    'stationarity': check_stationarity,
    'divergence_preservation': check_divergence_preservation,
    'transport_identity': check_transport_identity,
    'buoyancy_sign': check_buoyancy_sign,
    'euler_reduction': check_euler_reduction,
    'scaling': check_scaling_identity,
    'derivative_identity': check_derivative_identity,
}


def run_validation(ctx: ValidationContext, names: Optional[List[str]] = None) -> List[CheckResult]:
    """Run the named checks (all by default) in a fixed order"""
    names = names or list(CHECKS)
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise ConfigError(f"Unknown checks {unknown}; choose from {list(CHECKS)}")
    results = []
    for name in names:
        logger.info(f"Running check '{name}'")
        try:
            results.extend(CHECKS[name](ctx))
        except (BoussinesqError, ValueError) as e:
            logger.error(f"Check '{name}' failed with {type(e).__name__}: {e}")
            results.append(CheckResult(name, None, None, False, error=f"{type(e).__name__}: {e}",
                                       solver_failure=isinstance(e, SolverError)))
    for result in results:
        level = logging.INFO if result.passed else logging.WARNING
        logger.log(level, f"{result.name}: value={result.value} tolerance={result.tolerance} "
                          f"{'PASS' if result.passed else 'FAIL'}")
    return results


def raise_on_failure(results: List[CheckResult]):
    """SolverError when a check hit a solver failure, PropertyFailure when a check missed its tolerance"""
    failed = [r.name for r in results if not r.passed]
    if not failed:
        return
    message = f"{len(failed)} of {len(results)} checks failed: {', '.join(failed)}"
    if any(r.solver_failure for r in results):
        raise SolverError(message)
    raise PropertyFailure(message)
