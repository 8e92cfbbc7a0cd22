import numpy as np
import pytest

from errors import PropertyFailure, SolverError
from experiments import CheckResult, ValidationContext, raise_on_failure
from experiments.validation import check_buoyancy_riesz_route, check_stationarity
from models import SolverParams
from tests.helpers import scalar, taylor_green_velocity


def test_riesz_route_matches_direct_buoyancy(grid64):
    def datum(grid):
        theta0 = scalar(grid, lambda x1, x2: 0.1 * np.cos(x1) + 0.05 * np.sin(x1 + x2), 'theta')
        return taylor_green_velocity(grid, 0.2), theta0

    ctx = ValidationContext(grid64, SolverParams(dt=0.05, T=0.5), datum_factory=datum,
                            euler_factory=lambda grid: (taylor_green_velocity(grid, 0.2), None),
                            phi_T=0.5)
    [result] = check_buoyancy_riesz_route(ctx)
    assert result.name == 'buoyancy_riesz_route'
    assert result.details['displacement'] > 1e-2
    assert result.value < 1e-4
    assert result.passed


def test_rest_survives_a_thousand_steps(grid16):
    ctx = ValidationContext(grid16, SolverParams(dt=0.05, T=0.5), datum_factory=None, euler_factory=None)
    [result] = check_stationarity(ctx)
    assert result.details['steps'] == 1000
    assert result.value == 0.0
    assert result.passed


def test_raise_on_failure_picks_the_exit():
    ok = CheckResult('a', 0.0, 1.0, True)
    missed = CheckResult('b', 2.0, 1.0, False)
    crashed = CheckResult('c', None, 1.0, False, error='CFLViolation: too fast', solver_failure=True)

    raise_on_failure([ok])
    with pytest.raises(PropertyFailure, match='1 of 2 checks failed: b') as excinfo:
        raise_on_failure([ok, missed])
    assert excinfo.value.exit_code == 4
    with pytest.raises(SolverError) as excinfo:
        raise_on_failure([ok, missed, crashed])
    assert excinfo.value.exit_code == 3
