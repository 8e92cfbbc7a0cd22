import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models import Grid2D  # noqa: E402


@pytest.fixture
def grid16():
    return Grid2D(16, 2 * np.pi)


@pytest.fixture
def grid32():
    return Grid2D(32, 2 * np.pi)


@pytest.fixture
def grid64():
    return Grid2D(64, 2 * np.pi)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
