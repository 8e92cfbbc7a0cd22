import json
import os
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from errors import ConfigError

# Force reload environment variables
load_dotenv(override=True)


class Config:
    # Grid defaults
    GRID_N = int(os.environ.get('BOUSSINESQ_GRID_N', '256'))
    BOX_LENGTH = float(os.environ.get('BOUSSINESQ_BOX_LENGTH', '32.0'))

    # Integrator defaults
    DT = float(os.environ.get('BOUSSINESQ_DT', '0.001'))
    T = float(os.environ.get('BOUSSINESQ_T', '1.0'))
    SOBOLEV_S = float(os.environ.get('BOUSSINESQ_SOBOLEV_S', '3.0'))

    # Run artifacts
    OUTPUT_DIR = os.environ.get('BOUSSINESQ_OUTPUT_DIR') or 'runs'
    THREADS = int(os.environ.get('BOUSSINESQ_THREADS', '1'))
    STORAGE_TYPE = os.environ.get('STORAGE_TYPE', 'local')
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO').upper()


class _Section(BaseModel):
    model_config = ConfigDict(extra='forbid')


class GridSection(_Section):
    n: int = Field(default_factory=lambda: Config.GRID_N)
    box_length: float = Field(default_factory=lambda: Config.BOX_LENGTH, gt=0)

    @field_validator('n')
    @classmethod
    def even_and_large_enough(cls, n: int) -> int:
        if n < 8 or n % 2:
            raise ValueError('grid size must be an even integer >= 8')
        return n


class SolverSection(_Section):
    dt: float = Field(default_factory=lambda: Config.DT, gt=0)
    T: float = Field(default_factory=lambda: Config.T, ge=0)
    s: float = Field(default_factory=lambda: Config.SOBOLEV_S)
    inversion_tol: float = Field(default=1e-10, gt=0)
    max_iters: int = Field(default=100, ge=1)
    cfl: float = Field(default=0.5, gt=0)
    blowup_threshold: float = Field(default=0.9, gt=0, lt=1)
    save_every: int = Field(default=10, ge=0)

    @field_validator('s')
    @classmethod
    def above_two(cls, s: float) -> float:
        if not s > 2:
            raise ValueError('Sobolev index s must exceed 2')
        return s

    @model_validator(mode='after')
    def step_within_horizon(self):
        if self.T > 0 and self.dt > self.T:
            raise ValueError(f'dt={self.dt} exceeds T={self.T}')
        return self


class DatumSection(_Section):
    preset: Literal['rest', 'taylor_green', 'shear', 'gaussian_vortex', 'bump_theta', 'custom'] = 'bump_theta'
    amplitude: float = 0.1
    theta_amplitude: float = 0.05
    u0_path: Optional[str] = None
    theta0_path: Optional[str] = None

    @model_validator(mode='after')
    def custom_needs_paths(self):
        if self.preset == 'custom' and not self.u0_path:
            raise ValueError("preset 'custom' requires u0_path")
        return self


class ExperimentSection(_Section):
    R: float = Field(default=1.0, gt=0)
    n_list: List[int] = Field(default_factory=lambda: [2, 4, 8, 16])
    x_star: Optional[Tuple[float, float]] = None
    u_star_preset: Literal['gaussian_stream'] = 'gaussian_stream'
    u_star_width: float = Field(default=2.0, gt=0)
    u_star_amplitude: float = 1.0
    base_data: List[Literal['rest', 'bump_theta']] = Field(default_factory=lambda: ['rest', 'bump_theta'])
    support_scale: Union[Literal['auto'], float] = 1.0
    auto_target_cells: float = Field(default=4.0, ge=2.0)
    epsilon: float = Field(default=1e-4, gt=0)
    dt: Optional[float] = Field(default=None, gt=0)

    @field_validator('n_list')
    @classmethod
    def positive_indices(cls, n_list: List[int]) -> List[int]:
        if not n_list or any(n < 1 for n in n_list):
            raise ValueError('n_list must hold positive integers')
        return n_list

    @field_validator('u_star_amplitude')
    @classmethod
    def nonzero_direction(cls, amplitude: float) -> float:
        if amplitude == 0:
            raise ValueError('u* amplitude is zero: the probe direction w* = 0 is degenerate')
        return amplitude

    @field_validator('support_scale')
    @classmethod
    def bounded_scale(cls, scale: Union[str, float]) -> Union[str, float]:
        # Larger scales let the two image supports overlap at the separation bound
        if scale != 'auto' and not 0 < scale <= 2.0:
            raise ValueError('support_scale must be auto or in (0, 2]')
        return scale


class ValidationSection(_Section):
    lambdas: List[float] = Field(default_factory=lambda: [0.5, 2.0])
    phi_T: float = Field(default=0.5, gt=0)
    euler_T: float = Field(default=0.5, gt=0)
    conservation_T: float = Field(default=1.0, gt=0)
    random_fields: int = Field(default=20, ge=1)
    refinement: bool = True
    checks: Optional[List[str]] = None
    seed: int = 0


class RunConfig(_Section):
    """Fully resolved configuration of one CLI run"""
    grid: GridSection = Field(default_factory=GridSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    datum: DatumSection = Field(default_factory=DatumSection)
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    validation: ValidationSection = Field(default_factory=ValidationSection)
    output_dir: str = Field(default_factory=lambda: Config.OUTPUT_DIR)
    threads: int = Field(default_factory=lambda: Config.THREADS, ge=1)

    @model_validator(mode='after')
    def experiment_step_within_horizon(self):
        if self.experiment.dt is not None and self.solver.T > 0 and self.experiment.dt > self.solver.T:
            raise ValueError(f'experiment.dt={self.experiment.dt} exceeds solver.T={self.solver.T}')
        return self

    @classmethod
    def load(cls, path: Optional[str] = None, overrides: Optional[dict] = None) -> 'RunConfig':
        """Parse a JSON config file, apply flag overrides and validate.

        Raises:
            ConfigError: with the offending field path (or JSON line/column).
        """
        data = {}
        if path:
            try:
                text = Path(path).read_text(encoding='utf-8')
            except OSError as e:
                raise ConfigError(f"Cannot read config {path}: {e}") from e
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
            if not isinstance(data, dict):
                raise ConfigError(f"{path}: top level must be a JSON object")
        for dotted, value in (overrides or {}).items():
            if value is None:
                continue
            target = data
            *parents, leaf = dotted.split('.')
            for key in parents:
                target = target.setdefault(key, {})
            target[leaf] = value
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            details = '; '.join(
                f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}" for err in e.errors())
            raise ConfigError(f"Invalid configuration: {details}") from e
