"""Shared fixtures and helpers for the test suite."""

import numpy as np
import pytest

from densiscope.curves import DEFAULT_GRID_SIZE, DensityFn, density_from_values
from densiscope.simulate import RandomStream, beta_density


@pytest.fixture
def uniform_density() -> DensityFn:
    return DensityFn(0.0, 1.0, np.ones(DEFAULT_GRID_SIZE))


@pytest.fixture
def linear_density() -> DensityFn:
    """The density f(x) = 2x on [0, 1]."""
    x = np.linspace(0.0, 1.0, DEFAULT_GRID_SIZE)
    return density_from_values(2.0 * x)


@pytest.fixture
def stream() -> RandomStream:
    return RandomStream(12345)


def bump_density(i0: int, length: int = 160,
                 n: int = DEFAULT_GRID_SIZE) -> DensityFn:
    """A compactly supported bump starting at grid index `i0`.

    Useful for shift-invariance checks: two bumps at different offsets
    share the same shape exactly on the grid.
    """
    vals = np.zeros(n)
    vals[i0:i0 + length] = np.sin(np.linspace(0.0, np.pi, length)) ** 2
    return density_from_values(vals)


def beta(a: float, b: float) -> DensityFn:
    return beta_density(a, b)
