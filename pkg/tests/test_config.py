import json

import pytest

from config import RunConfig
from errors import ConfigError


def write(tmp_path, content) -> str:
    path = tmp_path / 'run.json'
    path.write_text(content if isinstance(content, str) else json.dumps(content))
    return str(path)


def test_file_and_overrides(tmp_path):
    path = write(tmp_path, {'grid': {'n': 32, 'box_length': 6.5}, 'solver': {'dt': 0.05, 'T': 0.5}})
    config = RunConfig.load(path, {'threads': 3, 'datum.preset': 'rest', 'output_dir': None})
    assert config.grid.n == 32
    assert config.grid.box_length == 6.5
    assert config.solver.dt == 0.05
    assert config.threads == 3
    assert config.datum.preset == 'rest'
    assert config.experiment.support_scale == 1.0


def test_invalid_json_reports_position(tmp_path):
    path = write(tmp_path, '{\n  "grid": }\n')
    with pytest.raises(ConfigError, match='line 2'):
        RunConfig.load(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(str(tmp_path / 'absent.json'))


def test_top_level_must_be_object(tmp_path):
    with pytest.raises(ConfigError, match='JSON object'):
        RunConfig.load(write(tmp_path, [1, 2]))


@pytest.mark.parametrize('data,path', [
    ({'solver': {'s': 2.0}}, 'solver.s'),
    ({'grid': {'n': 33}}, 'grid.n'),
    ({'grid': {'box_length': -1}}, 'grid.box_length'),
    ({'grid': {'colour': 'red'}}, 'grid.colour'),
    ({'experiment': {'u_star_amplitude': 0}}, 'experiment.u_star_amplitude'),
    ({'experiment': {'n_list': [0, 2]}}, 'experiment.n_list'),
    ({'experiment': {'support_scale': 12.5}}, 'experiment.support_scale'),
    ({'datum': {'preset': 'vortex_street'}}, 'datum.preset'),
])
def test_field_errors_name_the_field(tmp_path, data, path):
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.load(write(tmp_path, data))
    assert path in str(excinfo.value)
    assert excinfo.value.exit_code == 2


def test_custom_preset_needs_velocity(tmp_path):
    with pytest.raises(ConfigError, match='u0_path'):
        RunConfig.load(write(tmp_path, {'datum': {'preset': 'custom'}}))


def test_step_must_fit_horizon(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(write(tmp_path, {'solver': {'dt': 0.5, 'T': 0.1}}))
    with pytest.raises(ConfigError):
        RunConfig.load(write(tmp_path, {'solver': {'dt': 0.01, 'T': 0.1}, 'experiment': {'dt': 0.2}}))


def test_support_scale_accepts_number_or_auto(tmp_path):
    config = RunConfig.load(write(tmp_path, {'experiment': {'support_scale': 1.5}}))
    assert config.experiment.support_scale == 1.5
    config = RunConfig.load(write(tmp_path, {'experiment': {'support_scale': 'auto'}}))
    assert config.experiment.support_scale == 'auto'


def test_default_step(tmp_path):
    config = RunConfig.load(write(tmp_path, {}))
    assert config.solver.dt == 0.001
    assert config.experiment.support_scale == 1.0
