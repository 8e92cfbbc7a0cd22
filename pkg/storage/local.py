import csv
import io
import json
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import numpy as np

from errors import StorageError
from models import Diffeo, Grid2D, ScalarField, VectorField2

Field = Union[ScalarField, VectorField2, Diffeo]

# kind -> array shape for an n x n grid
FIELD_KINDS = {
    'scalar': lambda n: (n, n),
    'vector2': lambda n: (2, n, n),
    'diffeo': lambda n: (2, n, n),
}


def _format_cell(value) -> str:
    """repr for floats so numbers round-trip and CSVs are reproducible"""
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


class LocalStorage:
    """Run artifacts under a local output directory"""

    def __init__(self, base_path: str = "runs"):
        self.base_path = Path(base_path)
        try:
            self.base_path.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise StorageError(f"Cannot create output directory {base_path}: {e}") from e

    def _full_path(self, file_path: str) -> Path:
        full_path = self.base_path / file_path
        full_path.parent.mkdir(parents=True, exist_ok=True)
        return full_path

    def store_file_content(self, content: str, file_path: str) -> str:
        """Store string content as a file"""
        try:
            full_path = self._full_path(file_path)
            with open(full_path, 'w', encoding='utf-8', newline='') as f:
                f.write(content)
        except OSError as e:
            raise StorageError(f"Cannot write {file_path}: {e}") from e
        return str(full_path)

    def store_bytes(self, content: bytes, file_path: str) -> str:
        try:
            full_path = self._full_path(file_path)
            with open(full_path, 'wb') as f:
                f.write(content)
        except OSError as e:
            raise StorageError(f"Cannot write {file_path}: {e}") from e
        return str(full_path)

    def store_json(self, data, file_path: str) -> str:
        return self.store_file_content(json.dumps(data, indent=2, sort_keys=True) + '\n', file_path)

    def store_csv(self, header: Sequence[str], rows: Iterable[Sequence], file_path: str) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(value) for value in row])
        return self.store_file_content(buffer.getvalue(), file_path)

    def store_field(self, field: Field, file_path: str) -> str:
        """Raw little-endian float64 dump plus a JSON sidecar describing the grid.

        Scalars are stored as (n, n), vectors and diffeomorphisms (their
        displacement) as (2, n, n), all row-major with axis 0 along x1.
        """
        if isinstance(field, Diffeo):
            kind, values = 'diffeo', field.displacement.stack()
        elif isinstance(field, VectorField2):
            kind, values = 'vector2', field.stack()
        else:
            kind, values = 'scalar', field.values
        grid = field.grid
        path = self.store_bytes(np.ascontiguousarray(values, dtype='<f8').tobytes(), f"{file_path}.f64")
        self.store_json({'kind': kind, 'n': grid.n, 'box_length': grid.box_length,
                         'shape': list(values.shape), 'dtype': '<f8'}, f"{file_path}.json")
        return path

    def load_field(self, file_path: str) -> Field:
        """Inverse of store_field; ``file_path`` is given without extension."""
        try:
            meta = json.loads(self.get_file(f"{file_path}.json"))
            raw = np.frombuffer(self.get_file(f"{file_path}.f64"), dtype='<f8')
            kind = meta['kind']
            if kind not in FIELD_KINDS:
                raise ValueError(f"unknown field kind {kind!r}")
            grid = Grid2D(int(meta['n']), float(meta['box_length']))
            values = raw.reshape(meta['shape'])
            if values.shape != FIELD_KINDS[kind](grid.n):
                raise ValueError(f"shape {list(values.shape)} does not fit a {kind} on n={grid.n}")
        except (OSError, ValueError, KeyError, TypeError) as e:
            raise StorageError(f"Cannot read field {file_path}: {e}") from e
        if kind == 'scalar':
            return ScalarField(grid, values.copy())
        vector = VectorField2.from_arrays(grid, values[0].copy(), values[1].copy())
        return Diffeo(vector) if kind == 'diffeo' else vector

    def get_file(self, file_path: str) -> bytes:
        """Retrieve file contents"""
        full_path = self.base_path / file_path
        with open(full_path, 'rb') as f:
            return f.read()

    def file_exists(self, file_path: str) -> bool:
        """Check if file exists"""
        full_path = self.base_path / file_path
        return full_path.exists()

    def list_files(self, pattern: str = '*') -> List[str]:
        return sorted(str(p.relative_to(self.base_path)) for p in self.base_path.rglob(pattern))
