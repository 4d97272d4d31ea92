"""Shared fixtures: small grids and generators used across the suite."""

import numpy as np
import pytest

from maxreg_lab import TorusGrid, uniform_time_grid


@pytest.fixture
def grid1d():
    return TorusGrid(dimension=1, points_per_axis=16)


@pytest.fixture
def grid2d():
    return TorusGrid(dimension=2, points_per_axis=16)


@pytest.fixture
def grid3d():
    return TorusGrid(dimension=3, points_per_axis=8)


@pytest.fixture
def short_time():
    return uniform_time_grid(1.0, 33)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
