"""Domain types: the periodic grid, fields on it, diffeomorphisms and solver state."""
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from errors import BlowupDetected


def _read_only(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Grid2D:
    """Uniform n x n grid on the periodic box [0, box_length)^2.

    Array axis 0 runs along x1 and axis 1 along x2 (``indexing='ij'``).
    """
    n: int
    box_length: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8 or self.n % 2 != 0:
            raise ValueError(f"Grid size must be an even integer >= 8, got {self.n}")
        if not self.box_length > 0:
            raise ValueError(f"Box length must be positive, got {self.box_length}")

    @property
    def spacing(self) -> float:
        return self.box_length / self.n

    @property
    def box_area(self) -> float:
        return self.box_length ** 2

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers in FFT order: 0, 1, ..., n/2-1, -n/2, ..., -1"""
        return _read_only(np.fft.fftfreq(self.n, d=1.0 / self.n))

    @cached_property
    def frequencies(self) -> np.ndarray:
        return _read_only(2.0 * np.pi * self.wavenumbers / self.box_length)

    @cached_property
    def xi(self) -> Tuple[np.ndarray, np.ndarray]:
        xi1, xi2 = np.meshgrid(self.frequencies, self.frequencies, indexing='ij')
        return _read_only(xi1), _read_only(xi2)

    @cached_property
    def xi_odd(self) -> Tuple[np.ndarray, np.ndarray]:
        """Frequencies with the Nyquist row/column zeroed, for odd-order symbols."""
        nyquist = self.wavenumbers == -self.n // 2
        freq = np.where(nyquist, 0.0, self.frequencies)
        xi1, xi2 = np.meshgrid(freq, freq, indexing='ij')
        return _read_only(xi1), _read_only(xi2)

    @cached_property
    def xi_norm(self) -> np.ndarray:
        xi1, xi2 = self.xi
        return _read_only(np.hypot(xi1, xi2))

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        k1, k2 = np.meshgrid(self.wavenumbers, self.wavenumbers, indexing='ij')
        cutoff = self.n / 3.0
        mask = (np.abs(k1) <= cutoff) & (np.abs(k2) <= cutoff)
        return _read_only(mask.astype(np.float64))

    @cached_property
    def coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.n) * self.spacing
        x1, x2 = np.meshgrid(x, x, indexing='ij')
        return _read_only(x1), _read_only(x2)

    @cached_property
    def points(self) -> np.ndarray:
        """Grid nodes as an (n, n, 2) array"""
        return _read_only(np.stack(self.coordinates, axis=-1))


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real samples of a periodic function on a grid"""
    grid: Grid2D
    values: np.ndarray
    role: str = 'scalar'

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (self.grid.n, self.grid.n):
            raise ValueError(
                f"Field shape {values.shape} does not match grid ({self.grid.n}, {self.grid.n})")
        if not np.all(np.isfinite(values)):
            raise BlowupDetected(f"Field '{self.role}' has non-finite values")
        object.__setattr__(self, 'values', _read_only(values))

    @classmethod
    def zeros(cls, grid: Grid2D, role: str = 'scalar') -> 'ScalarField':
        return cls(grid, np.zeros((grid.n, grid.n)), role)

    @classmethod
    def from_function(cls, grid: Grid2D, function, role: str = 'scalar') -> 'ScalarField':
        """Sample ``function(x1, x2)`` at the grid nodes."""
        x1, x2 = grid.coordinates
        return cls(grid, np.broadcast_to(function(x1, x2), (grid.n, grid.n)), role)

    def with_role(self, role: str) -> 'ScalarField':
        return ScalarField(self.grid, self.values, role)

    def _check_grid(self, other: 'ScalarField'):
        if other.grid != self.grid:
            raise ValueError(f"Grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other: 'ScalarField') -> 'ScalarField':
        self._check_grid(other)
        return ScalarField(self.grid, self.values + other.values, self.role)

    def __sub__(self, other: 'ScalarField') -> 'ScalarField':
        self._check_grid(other)
        return ScalarField(self.grid, self.values - other.values, self.role)

    def __neg__(self) -> 'ScalarField':
        return ScalarField(self.grid, -self.values, self.role)

    def __mul__(self, other) -> 'ScalarField':
        if isinstance(other, ScalarField):
            self._check_grid(other)
            return ScalarField(self.grid, self.values * other.values, self.role)
        return ScalarField(self.grid, self.values * float(other), self.role)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> 'ScalarField':
        return ScalarField(self.grid, self.values / float(scalar), self.role)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def mean(self) -> float:
        return float(np.mean(self.values))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.values ** 2)) * self.grid.spacing)

    def is_zero(self) -> bool:
        return not np.any(self.values)


@dataclass(frozen=True, eq=False)
class VectorField2:
    """Pair of scalar fields (u1, u2) on a common grid"""
    u1: ScalarField
    u2: ScalarField

    def __post_init__(self):
        if self.u1.grid != self.u2.grid:
            raise ValueError("Vector components live on different grids")

    @property
    def grid(self) -> Grid2D:
        return self.u1.grid

    @property
    def components(self) -> Tuple[ScalarField, ScalarField]:
        return self.u1, self.u2

    @classmethod
    def zeros(cls, grid: Grid2D, role: str = 'vector') -> 'VectorField2':
        return cls(ScalarField.zeros(grid, role), ScalarField.zeros(grid, role))

    @classmethod
    def from_arrays(cls, grid: Grid2D, a1: np.ndarray, a2: np.ndarray,
                    role: str = 'vector') -> 'VectorField2':
        return cls(ScalarField(grid, a1, role), ScalarField(grid, a2, role))

    def stack(self) -> np.ndarray:
        """Components as a (2, n, n) array"""
        return np.stack([self.u1.values, self.u2.values])

    def __add__(self, other: 'VectorField2') -> 'VectorField2':
        return VectorField2(self.u1 + other.u1, self.u2 + other.u2)

    def __sub__(self, other: 'VectorField2') -> 'VectorField2':
        return VectorField2(self.u1 - other.u1, self.u2 - other.u2)

    def __neg__(self) -> 'VectorField2':
        return VectorField2(-self.u1, -self.u2)

    def __mul__(self, scalar: float) -> 'VectorField2':
        return VectorField2(self.u1 * scalar, self.u2 * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> 'VectorField2':
        return VectorField2(self.u1 / scalar, self.u2 / scalar)

    def max_abs(self) -> float:
        """Largest pointwise Euclidean length"""
        return float(np.max(np.hypot(self.u1.values, self.u2.values)))

    def l2_norm(self) -> float:
        return float(math.hypot(self.u1.l2_norm(), self.u2.l2_norm()))

    def is_zero(self) -> bool:
        return self.u1.is_zero() and self.u2.is_zero()


@dataclass(frozen=True, eq=False)
class SpectralCoeffs:
    """Fourier coefficients in FFT order, normalized so that values[0, 0] is the mean."""
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.complex128)
        if values.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"Coefficient shape {values.shape} does not match grid")
        object.__setattr__(self, 'values', _read_only(values))


@dataclass(frozen=True, eq=False)
class Diffeo:
    """phi(x) = x + d(x) with a periodic displacement d.

    Orientation (det d phi > 0) is checked where it is used, see
    ``fields.diffeo.ensure_orientation``.
    """
    displacement: VectorField2

    @classmethod
    def identity(cls, grid: Grid2D) -> 'Diffeo':
        return cls(VectorField2.zeros(grid, 'displacement'))

    @property
    def grid(self) -> Grid2D:
        return self.displacement.grid

    @property
    def positions(self) -> np.ndarray:
        """phi at the grid nodes as an (n, n, 2) array"""
        return self.grid.points + np.moveaxis(self.displacement.stack(), 0, -1)

    def is_identity(self) -> bool:
        return self.displacement.is_zero()


@dataclass(frozen=True, eq=False)
class LagrangianState:
    """(phi, v) at time t, with v = u o phi the Lagrangian velocity"""
    phi: Diffeo
    v: VectorField2
    t: float = 0.0

    def __post_init__(self):
        if self.phi.grid != self.v.grid:
            raise ValueError("phi and v live on different grids")

    @property
    def grid(self) -> Grid2D:
        return self.v.grid


@dataclass(frozen=True, eq=False)
class SolverParams:
    """Numerical parameters of the Lagrangian integrator.

    ``theta0`` is the buoyancy label field carried through the run; ``solve``
    fills it in from its argument.
    """
    dt: float = 1e-3
    T: float = 1.0
    s: float = 3.0
    theta0: Optional[ScalarField] = None
    inversion_tol: float = 1e-10
    max_iters: int = 100
    cfl: float = 0.5
    blowup_threshold: float = 0.9
    save_every: int = 0
    diagnostics: bool = True
    require_divfree: bool = True
    divergence_tol: float = 1e-10

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.T < 0:
            raise ValueError(f"T must be non-negative, got {self.T}")
        if self.T > 0 and self.dt > self.T * (1 + 1e-12):
            raise ValueError(f"dt={self.dt} exceeds the horizon T={self.T}")
        if not self.s > 2:
            raise ValueError(f"Sobolev index must exceed 2, got {self.s}")

    @property
    def n_steps(self) -> int:
        if self.T == 0:
            return 0
        return max(1, int(math.ceil(self.T / self.dt - 1e-9)))

    @property
    def step_size(self) -> float:
        """Uniform step that lands exactly on T"""
        return self.T / self.n_steps if self.n_steps else 0.0

    def with_theta0(self, theta0: Optional[ScalarField]) -> 'SolverParams':
        return replace(self, theta0=theta0)

    def with_horizon(self, T: float, dt: Optional[float] = None) -> 'SolverParams':
        return replace(self, T=T, dt=self.dt if dt is None else dt)


@dataclass
class Trajectory:
    """Saved states of one solve, with per-save diagnostics"""
    params: SolverParams
    times: List[float] = field(default_factory=list)
    states: List[LagrangianState] = field(default_factory=list)
    diagnostics: List[Dict[str, float]] = field(default_factory=list)

    def append(self, state: LagrangianState, diagnostics: Optional[Dict[str, float]] = None):
        if self.times and state.t <= self.times[-1]:
            raise ValueError(f"Save times must increase: {state.t} after {self.times[-1]}")
        self.times.append(state.t)
        self.states.append(state)
        self.diagnostics.append(diagnostics or {})

    @property
    def final(self) -> LagrangianState:
        return self.states[-1]

    @property
    def theta0(self) -> Optional[ScalarField]:
        return self.params.theta0

    def series(self, name: str) -> np.ndarray:
        return np.array([d[name] for d in self.diagnostics])


@dataclass(frozen=True, eq=False)
class EulerianState:
    """Vorticity and buoyancy of the Eulerian reference solver"""
    omega: ScalarField
    theta: ScalarField
    t: float = 0.0
    mean_velocity: Tuple[float, float] = (0.0, 0.0)
