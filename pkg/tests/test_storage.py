import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from errors import ConfigError, StorageError
from models import Diffeo, ScalarField, VectorField2
from storage import LocalStorage, get_storage
from tests.helpers import scalar, taylor_green_velocity


@pytest.fixture
def storage(tmp_path):
    return LocalStorage(str(tmp_path / 'run'))


def test_scalar_field_dump(storage, grid16):
    theta = scalar(grid16, lambda x1, x2: np.sin(x1) * np.cos(3 * x2), 'theta')
    path = storage.store_field(theta, 'fields/theta')
    assert path.endswith('theta.f64')
    assert len(storage.get_file('fields/theta.f64')) == 16 * 16 * 8

    loaded = storage.load_field('fields/theta')
    assert isinstance(loaded, ScalarField)
    assert loaded.grid == grid16
    assert_array_equal(loaded.values, theta.values)


def test_vector_and_diffeo_dumps(storage, grid16):
    u = taylor_green_velocity(grid16)
    storage.store_field(u, 'u')
    storage.store_field(Diffeo(u * 0.1), 'phi')

    loaded_u = storage.load_field('u')
    assert isinstance(loaded_u, VectorField2)
    assert_array_equal(loaded_u.u2.values, u.u2.values)

    loaded_phi = storage.load_field('phi')
    assert isinstance(loaded_phi, Diffeo)
    assert_array_equal(loaded_phi.displacement.u1.values, (u * 0.1).u1.values)


def test_dump_layout_has_x1_along_axis_zero(storage, grid16):
    theta = scalar(grid16, lambda x1, x2: x1 + 0 * x2)
    storage.store_field(theta, 'ramp')
    raw = np.frombuffer(storage.get_file('ramp.f64'), dtype='<f8').reshape(16, 16)
    assert raw[3, 0] == pytest.approx(3 * grid16.spacing)
    assert raw[0, 3] == 0.0


def test_vector_sidecar_kind(storage, grid16):
    storage.store_field(taylor_green_velocity(grid16), 'u')
    assert json.loads(storage.get_file('u.json'))['kind'] == 'vector2'


def test_truncated_dump(storage, grid16):
    storage.store_field(taylor_green_velocity(grid16), 'u')
    storage.store_bytes(b'\x00' * 8, 'u.f64')
    with pytest.raises(StorageError):
        storage.load_field('u')


@pytest.mark.parametrize('sidecar', [
    {'n': 16, 'box_length': 1.0, 'shape': [16, 16], 'dtype': '<f8'},
    {'kind': 'tensor', 'n': 16, 'box_length': 1.0, 'shape': [16, 16], 'dtype': '<f8'},
    {'kind': 'scalar', 'n': 16, 'box_length': 1.0, 'shape': [2, 8, 16], 'dtype': '<f8'},
])
def test_malformed_sidecar(storage, sidecar):
    storage.store_bytes(np.zeros(256, dtype='<f8').tobytes(), 'f.f64')
    storage.store_json(sidecar, 'f.json')
    with pytest.raises(StorageError):
        storage.load_field('f')


def test_missing_field(storage):
    with pytest.raises(StorageError):
        storage.load_field('nothing')


def test_csv_cells(storage):
    storage.store_csv(['n', 'gap', 'flag', 'note'], [[2, 0.1, True, None], [4, 1e-20, False, 'ok']],
                      'table.csv')
    text = storage.get_file('table.csv').decode()
    assert text == 'n,gap,flag,note\n2,0.1,true,\n4,1e-20,false,ok\n'


def test_json_is_sorted(storage):
    storage.store_json({'b': 1, 'a': [1.5, None]}, 'out.json')
    text = storage.get_file('out.json').decode()
    assert text.index('"a"') < text.index('"b"')
    assert storage.file_exists('out.json')
    assert storage.list_files('*.json') == ['out.json']


def test_get_storage_local(tmp_path, monkeypatch):
    monkeypatch.delenv('STORAGE_TYPE', raising=False)
    backend = get_storage(str(tmp_path / 'out'))
    assert isinstance(backend, LocalStorage)
    assert (tmp_path / 'out').is_dir()


def test_get_storage_unknown_type(tmp_path, monkeypatch):
    monkeypatch.setenv('STORAGE_TYPE', 's3')
    with pytest.raises(ConfigError):
        get_storage(str(tmp_path))
