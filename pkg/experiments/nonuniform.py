"""Non-uniform dependence experiment.

Around a base datum w0 = (u0, theta0) we build pairs

    w0(n)  = w0 + (0, theta_n)
    w~0(n) = w0(n) + w*/n

where theta_n is a bump of radius r_n ~ 1/n centred at x*, normalized to
||theta_n||_s = R/2, and w* = (u*, 0) is a unit direction whose flow moves x*.
The input gap ||w*||_s/n vanishes while the bumps get transported apart by a
distance of the same order as their radius, so the output gap in the theta
component does not.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from errors import BoussinesqError, ConfigError, DegenerateDirection, UnresolvableBump
from fields import (
    bump,
    compose_scalar,
    evaluate_diffeo,
    gradient_operator_norm,
    normalize_hs,
    periodic_distance,
    periodic_offset,
    support_points,
)
from models import Diffeo, Grid2D, ScalarField, SolverParams, VectorField2
from solver import flow_map_Psi, solution_map_with_flow
from spectral import pair_sobolev_norm, sobolev_norm, vector_sobolev_norm

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['n', 'r_n', 'input_gap', 'output_gap', 'separation', 'lower_bound_separation',
               'ratio_min', 'ratio_max', 'status']

M_SAFETY = 0.5
LIPSCHITZ_SAFETY = 1.1
DERIVATIVE_FLOOR = 1e-8
THETA0_CLEARANCE = 2.0
PROBE_BALL_RADIUS = 1.0
BOUNDARY_SAMPLES = 64
# Slack on "the ratio band contains 1", covering interpolation damping.
BAND_TOLERANCE = 1e-2
# Above 2, twice the scaled image-radius bound c m||w*||/(8n) exceeds the separation bound m||w*||/(2n).
MAX_SUPPORT_SCALE = 2.0
MIN_INPUT_GAP_DROP = 8.0
RETENTION_FLOOR = 0.5
SLOPE_TOLERANCE = 0.01

Datum = Tuple[VectorField2, Optional[ScalarField]]


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Base datum, probe point and unit direction of one experiment.

    Build it with ``make_experiment_config``, which normalizes u* and checks
    the clearance between x* and supp theta0.
    """
    name: str
    u0: VectorField2
    theta0: ScalarField
    u_star: VectorField2
    x_star: Tuple[float, float]
    R: float
    n_list: Tuple[int, ...]
    params: SolverParams
    support_scale: Union[float, str] = 1.0
    auto_target_cells: float = 4.0
    epsilon: float = 1e-4
    threads: int = 1

    @property
    def grid(self) -> Grid2D:
        return self.u0.grid

    @property
    def s(self) -> float:
        return self.params.s

    @property
    def base(self) -> Datum:
        return self.u0, self.theta0

    @property
    def direction(self) -> Datum:
        return self.u_star, ScalarField.zeros(self.grid, 'theta')

    @property
    def w_star_norm(self) -> float:
        return vector_sobolev_norm(self.u_star, self.s)


@dataclass(frozen=True, eq=False)
class SequenceMember:
    n: int
    r_n: float
    theta_n: ScalarField
    base: Datum
    probe: Datum


@dataclass
class ExperimentRecord:
    """Measurements for one n; fields stay None when the run failed."""
    n: int
    r_n: Optional[float] = None
    input_gap: Optional[float] = None
    output_gap: Optional[float] = None
    separation: Optional[float] = None
    lower_bound_separation: Optional[float] = None
    image_radius: Optional[float] = None
    image_radius_probe: Optional[float] = None
    image_radius_bound: Optional[float] = None
    supports_disjoint: Optional[bool] = None
    set_distance: Optional[float] = None
    ratio_min: Optional[float] = None
    ratio_max: Optional[float] = None
    in_ball: Optional[bool] = None
    status: str = 'ok'

    @property
    def measured(self) -> bool:
        return self.output_gap is not None

    def csv_row(self) -> list:
        return [getattr(self, column) for column in CSV_COLUMNS]

    def to_dict(self) -> dict:
        return asdict(self)


def support_clearance(theta0: ScalarField, x_star: Sequence[float]) -> float:
    """Distance from x* to the nonzero nodes of theta0 (inf when theta0 = 0)"""
    points = support_points(theta0)
    if len(points) == 0:
        return math.inf
    return float(np.min(periodic_distance(theta0.grid, points, x_star)))


def make_experiment_config(name: str, u0: VectorField2, theta0: Optional[ScalarField],
                           u_star: VectorField2, x_star: Sequence[float], R: float,
                           n_list: Sequence[int], params: SolverParams,
                           support_scale: Union[float, str] = 1.0,
                           auto_target_cells: float = 4.0, epsilon: float = 1e-4,
                           threads: int = 1) -> ExperimentConfig:
    grid = u0.grid
    theta0 = theta0 if theta0 is not None else ScalarField.zeros(grid, 'theta')
    norm = vector_sobolev_norm(u_star, params.s)
    if norm == 0:
        raise DegenerateDirection("Probe direction u* is zero")
    if not R > 0:
        raise ConfigError(f"Ball radius R must be positive, got {R}")
    if not n_list or any(int(n) != n or n < 1 for n in n_list):
        raise ConfigError(f"n_list must hold positive integers, got {list(n_list)}")
    if support_scale != 'auto' and not 0 < float(support_scale) <= MAX_SUPPORT_SCALE:
        raise ConfigError(
            f"support_scale must be 'auto' or in (0, {MAX_SUPPORT_SCALE:g}], got {support_scale}")
    clearance = support_clearance(theta0, x_star)
    if clearance <= THETA0_CLEARANCE:
        raise ConfigError(
            f"x* = {tuple(x_star)} is {clearance:.3f} from supp theta0; need more than {THETA0_CLEARANCE:g}")
    return ExperimentConfig(
        name=name, u0=u0, theta0=theta0, u_star=u_star / norm,
        x_star=(float(x_star[0]), float(x_star[1])), R=float(R),
        n_list=tuple(sorted({int(n) for n in n_list})), params=params,
        support_scale=support_scale, auto_target_cells=auto_target_cells,
        epsilon=epsilon, threads=threads)


def _shift(w0: Datum, w: Datum, factor: float) -> Datum:
    u0, theta0 = w0
    du, dtheta = w
    u = u0 + du * factor
    if dtheta is None:
        return u, theta0
    if theta0 is None:
        return u, dtheta * factor
    return u, theta0 + dtheta * factor


def _is_zero(w: Datum) -> bool:
    du, dtheta = w
    return du.is_zero() and (dtheta is None or dtheta.is_zero())


def estimate_direction_derivative(w0: Datum, w: Datum, x_star: Sequence[float],
                                  params: SolverParams, epsilon: float = 1e-4) -> np.ndarray:
    """Central difference of (d_{w0} Psi)(w) evaluated at x*"""
    if _is_zero(w):
        return np.zeros(2)
    plus = flow_map_Psi(*_shift(w0, w, epsilon), params)
    minus = flow_map_Psi(*_shift(w0, w, -epsilon), params)
    point = np.asarray([x_star], dtype=np.float64)
    return (evaluate_diffeo(plus, point) - evaluate_diffeo(minus, point))[0] / (2 * epsilon)


def m_from_derivative(derivative: np.ndarray, w_star_norm: float) -> float:
    magnitude = float(np.linalg.norm(derivative))
    if magnitude < DERIVATIVE_FLOOR:
        raise DegenerateDirection(
            f"|d Psi(w*)(x*)| = {magnitude:.2e} is below {DERIVATIVE_FLOOR:.0e}; "
            f"choose another u* or x*")
    return M_SAFETY * magnitude / w_star_norm


def estimate_m(config: ExperimentConfig) -> float:
    derivative = estimate_direction_derivative(
        config.base, config.direction, config.x_star, config.params, config.epsilon)
    return m_from_derivative(derivative, config.w_star_norm)


def _theta_probe(config: ExperimentConfig) -> ScalarField:
    radius = max(PROBE_BALL_RADIUS, 2.0 * config.grid.spacing)
    return normalize_hs(bump(config.x_star, radius, config.grid), config.s, config.R / 2)


def probe_flows(config: ExperimentConfig) -> Dict[str, Diffeo]:
    """Flows Psi at the base datum and at points R/2 away from it inside the ball"""
    half = config.R / 2
    zero_theta = ScalarField.zeros(config.grid, 'theta')
    probes = {
        'base': config.base,
        'plus_direction': _shift(config.base, config.direction, half),
        'minus_direction': _shift(config.base, config.direction, -half),
        'theta_bump': _shift(config.base, (VectorField2.zeros(config.grid), _theta_probe(config)), 1.0),
    }
    flows = {}
    for label, (u, theta) in probes.items():
        flows[label] = flow_map_Psi(u, theta if theta is not None else zero_theta, config.params)
        logger.debug(f"[{config.name}] probe flow '{label}' done")
    return flows


def estimate_lipschitz(config: ExperimentConfig,
                       flows: Optional[Dict[str, Diffeo]] = None) -> float:
    """1.1 x the largest pointwise operator norm of I + grad d over the probe flows"""
    flows = flows if flows is not None else probe_flows(config)
    largest = max(gradient_operator_norm(phi).max_abs() for phi in flows.values())
    return LIPSCHITZ_SAFETY * largest


def sequence_radius(m: float, L: float, w_star_norm: float, n: int, scale: float = 1.0) -> float:
    """r_n = scale * m ||w*||_s / (8 n L)"""
    return scale * m * w_star_norm / (8.0 * n * L)


def resolve_support_scale(config: ExperimentConfig, m: float, L: float) -> float:
    """Explicit scale, or the smallest scale in [1, 2] that puts the largest n at the target resolution"""
    if config.support_scale != 'auto':
        return float(config.support_scale)
    smallest = sequence_radius(m, L, config.w_star_norm, max(config.n_list))
    wanted = config.auto_target_cells * config.grid.spacing / smallest
    return min(MAX_SUPPORT_SCALE, max(1.0, wanted))


def _sequence_members(config: ExperimentConfig, m: float, L: float
                      ) -> Tuple[Dict[int, SequenceMember], Dict[int, float], float]:
    scale = resolve_support_scale(config, m, L)
    members, failures = {}, {}
    for n in config.n_list:
        r_n = sequence_radius(m, L, config.w_star_norm, n, scale)
        try:
            shape = bump(config.x_star, r_n, config.grid)
        except UnresolvableBump as e:
            logger.warning(f"[{config.name}] n={n}: {e}")
            failures[n] = r_n
            continue
        theta_n = normalize_hs(shape, config.s, config.R / 2)
        base = (config.u0, config.theta0 + theta_n)
        probe = (config.u0 + config.u_star / n, config.theta0 + theta_n)
        members[n] = SequenceMember(n, r_n, theta_n, base, probe)
    return members, failures, scale


def build_sequences(config: ExperimentConfig, m: float, L: float
                    ) -> Tuple[Dict[int, SequenceMember], Dict[int, float], float]:
    """Members per resolvable n, r_n for the unresolvable rest, and the support scale used

    Raises:
        UnresolvableBump: if no n gives a resolvable bump.
    """
    members, failures, scale = _sequence_members(config, m, L)
    if not members:
        raise UnresolvableBump(f"No n in {list(config.n_list)} gives a resolvable bump")
    return members, failures, scale


def _wrap(grid: Grid2D, points: np.ndarray) -> np.ndarray:
    wrapped = np.mod(points, grid.box_length)
    wrapped[wrapped >= grid.box_length] = 0.0
    return wrapped


def set_distance(grid: Grid2D, first: np.ndarray, second: np.ndarray) -> float:
    """Minimal periodic distance between two point clouds"""
    if len(first) == 0 or len(second) == 0:
        return math.inf
    tree = cKDTree(_wrap(grid, np.asarray(second).reshape(-1, 2)), boxsize=grid.box_length)
    distances, _ = tree.query(_wrap(grid, np.asarray(first).reshape(-1, 2)))
    return float(np.min(distances))


def _circle(center: Sequence[float], radius: float) -> np.ndarray:
    angles = np.linspace(0.0, 2.0 * np.pi, BOUNDARY_SAMPLES, endpoint=False)
    return np.asarray(center) + radius * np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def _probe_ball(config: ExperimentConfig) -> np.ndarray:
    """Nodes of B_1(x*) in unwrapped coordinates, plus its boundary circle"""
    grid = config.grid
    offsets = periodic_offset(grid, grid.points, config.x_star).reshape(-1, 2)
    inside = offsets[np.linalg.norm(offsets, axis=-1) <= PROBE_BALL_RADIUS]
    return np.concatenate([np.asarray(config.x_star) + inside,
                           _circle(config.x_star, PROBE_BALL_RADIUS)])


def _theta0_support(config: ExperimentConfig) -> np.ndarray:
    return support_points(config.theta0)


def region_distance(config: ExperimentConfig, phi: Diffeo) -> float:
    """dist(phi(supp theta0), phi(B_1(x*)))"""
    support = _theta0_support(config)
    if len(support) == 0:
        return math.inf
    return set_distance(config.grid, evaluate_diffeo(phi, support),
                        evaluate_diffeo(phi, _probe_ball(config)))


def norm_ratio(theta: ScalarField, phi_inv: Diffeo, s: float) -> float:
    """||theta o phi^-1||_s / ||theta||_s"""
    return sobolev_norm(compose_scalar(theta, phi_inv, check=False), s) / sobolev_norm(theta, s)


def _image_radius(phi: Diffeo, center: Sequence[float], radius: float) -> Tuple[np.ndarray, float]:
    image_center = evaluate_diffeo(phi, np.asarray([center]))[0]
    boundary = evaluate_diffeo(phi, _circle(center, radius))
    return image_center, float(np.max(np.linalg.norm(boundary - image_center, axis=-1)))


def measure_member(config: ExperimentConfig, member: SequenceMember, m: float, scale: float,
                   base_distance: float = math.inf) -> ExperimentRecord:
    """Solve both data of one pair and record the gaps, separation and supports"""
    s = config.s
    n = member.n
    _, theta_a, phi_a, inv_a = solution_map_with_flow(*member.base, config.params)
    _, theta_b, phi_b, inv_b = solution_map_with_flow(*member.probe, config.params)

    input_gap = pair_sobolev_norm(member.probe[0] - member.base[0],
                                  member.probe[1] - member.base[1], s)
    output_gap = sobolev_norm(theta_b - theta_a, s)

    center_a, radius_a = _image_radius(phi_a, config.x_star, member.r_n)
    center_b, radius_b = _image_radius(phi_b, config.x_star, member.r_n)
    separation = float(np.linalg.norm(center_b - center_a))
    lower_bound = m * config.w_star_norm / (2.0 * n)
    ratios = [norm_ratio(member.theta_n, inv_a, s), norm_ratio(member.theta_n, inv_b, s)]

    distance = None
    if math.isfinite(base_distance):
        distance = min(region_distance(config, phi_a), region_distance(config, phi_b))

    offset_base = sobolev_norm(member.theta_n, s)
    offset_probe = pair_sobolev_norm(member.probe[0] - config.u0, member.theta_n, s)
    in_ball = max(offset_base, offset_probe) < config.R

    record = ExperimentRecord(
        n=n, r_n=member.r_n, input_gap=input_gap, output_gap=output_gap,
        separation=separation, lower_bound_separation=lower_bound,
        image_radius=radius_a, image_radius_probe=radius_b,
        image_radius_bound=scale * m * config.w_star_norm / (8.0 * n),
        supports_disjoint=separation > radius_a + radius_b,
        set_distance=distance, ratio_min=min(ratios), ratio_max=max(ratios), in_ball=in_ball)

    flags = []
    if separation < lower_bound:
        flags.append('separation_below_bound')
    if not record.supports_disjoint:
        flags.append('supports_overlap')
    if distance is not None and distance < base_distance / 2:
        flags.append('set_distance_below_half')
    if not in_ball:
        flags.append('outside_ball')
    record.status = ';'.join(flags) if flags else 'ok'
    logger.info(f"[{config.name}] n={n}: input_gap={input_gap:.3e} output_gap={output_gap:.3e} "
                f"separation={separation:.3e} status={record.status}")
    return record


def _measure_safely(config: ExperimentConfig, member: SequenceMember, m: float, scale: float,
                    base_distance: float) -> ExperimentRecord:
    try:
        return measure_member(config, member, m, scale, base_distance)
    except BoussinesqError as e:
        logger.error(f"[{config.name}] n={member.n} failed: {e}")
        return ExperimentRecord(n=member.n, r_n=member.r_n, status=f"solver_error: {e}")


def _log_slope(ns: List[int], values: List[float]) -> Optional[float]:
    if len(ns) < 2 or min(values) <= 0:
        return None
    slope, _ = np.polyfit(np.log(ns), np.log(values), 1)
    return float(slope)


def summarize(config: ExperimentConfig, records: List[ExperimentRecord], m: float, L: float,
              derivative: np.ndarray, scale: float, base_distance: float,
              R_star: float) -> dict:
    measured = [r for r in records if r.measured]
    summary = {
        'name': config.name,
        'm': m,
        'L': L,
        'derivative': [float(derivative[0]), float(derivative[1])],
        'support_scale': scale,
        'R': config.R,
        'R_star': R_star if math.isfinite(R_star) else None,
        'radius_admissible': config.R <= R_star,
        'base_set_distance': base_distance if math.isfinite(base_distance) else None,
        'resolvable_n': [r.n for r in measured],
        'failed_n': [r.n for r in records if not r.measured],
        'C1_band': None,
        'slope_input': None,
        'gap_retention': None,
        'input_gap_drop': None,
        'input_gap_drop_ok': None,
        'separation_ok': None,
        'supports_disjoint': None,
        'norm_band_ok': None,
        'passed': False,
    }
    if not measured:
        return summary

    low = min(r.ratio_min for r in measured)
    high = max(r.ratio_max for r in measured)
    summary['C1_band'] = [low, high]
    summary['norm_band_ok'] = high / low < 4 and low <= 1 + BAND_TOLERANCE and high >= 1 - BAND_TOLERANCE

    ns = [r.n for r in measured]
    summary['slope_input'] = _log_slope(ns, [r.input_gap for r in measured])
    first = measured[0]
    if first.output_gap > 0:
        summary['gap_retention'] = min(r.output_gap for r in measured) / first.output_gap
    if measured[-1].input_gap > 0:
        summary['input_gap_drop'] = first.input_gap / measured[-1].input_gap

    summary['separation_ok'] = all(r.separation >= r.lower_bound_separation for r in measured)
    summary['supports_disjoint'] = all(r.supports_disjoint for r in measured)
    drop = summary['input_gap_drop']
    summary['input_gap_drop_ok'] = drop is not None and drop >= MIN_INPUT_GAP_DROP * (1 - 1e-9)

    slope_ok = summary['slope_input'] is not None and abs(summary['slope_input'] + 1) <= SLOPE_TOLERANCE
    retention_ok = summary['gap_retention'] is not None and summary['gap_retention'] >= RETENTION_FLOOR
    summary['passed'] = bool(slope_ok and retention_ok and summary['separation_ok']
                             and summary['supports_disjoint'] and summary['input_gap_drop_ok'])
    return summary


def run_nonuniform(config: ExperimentConfig) -> Tuple[List[ExperimentRecord], dict]:
    """Run the whole experiment for one base datum; records are sorted by n."""
    logger.info(f"[{config.name}] estimating m and L on n={config.grid.n}")
    derivative = estimate_direction_derivative(
        config.base, config.direction, config.x_star, config.params, config.epsilon)
    m = m_from_derivative(derivative, config.w_star_norm)
    flows = probe_flows(config)
    L = estimate_lipschitz(config, flows)

    base_distance = region_distance(config, flows['base'])
    R_star = math.inf
    if math.isfinite(base_distance):
        deviation = max((flows[k].displacement - flows['base'].displacement).max_abs()
                        for k in flows if k != 'base')
        if deviation > 0:
            R_star = (config.R / 2) * (base_distance / 4) / deviation
    if config.R > R_star:
        logger.warning(f"[{config.name}] R={config.R:g} exceeds the measured admissible radius {R_star:.3g}")

    members, failures, scale = _sequence_members(config, m, L)
    if not members:
        logger.warning(f"[{config.name}] no n in {list(config.n_list)} gives a resolvable bump")
    logger.info(f"[{config.name}] m={m:.4g} L={L:.4g} support scale={scale:.4g}")

    ordered = [members[n] for n in sorted(members)]
    with ThreadPoolExecutor(max_workers=max(1, config.threads)) as pool:
        measured = list(pool.map(
            lambda member: _measure_safely(config, member, m, scale, base_distance), ordered))

    records = measured + [ExperimentRecord(n=n, r_n=r_n, status='unresolvable')
                          for n, r_n in failures.items()]
    records.sort(key=lambda r: r.n)
    return records, summarize(config, records, m, L, derivative, scale, base_distance, R_star)


def check_norm_equivalence(config: ExperimentConfig,
                           records: Optional[List[ExperimentRecord]] = None) -> dict:
    """Ratio table ||theta_n o phi^-1||_s / ||theta_n||_s and the empirical [1/C1, C1]"""
    if records is None:
        records, _ = run_nonuniform(config)
    measured = [r for r in records if r.measured]
    table = {r.n: [r.ratio_min, r.ratio_max] for r in measured}
    if not measured:
        return {'ratios': table, 'min': None, 'max': None, 'C1': None}
    low = min(r.ratio_min for r in measured)
    high = max(r.ratio_max for r in measured)
    return {'ratios': table, 'min': low, 'max': high, 'C1': max(high, 1.0 / low)}
