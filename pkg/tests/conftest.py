import numpy as np
import pytest

from molreg.grid import Grid2D


def dft_matrix(grid):
    """1-D midpoint-rule transform matrix ``kappa * exp(-2 pi i xi_k x_j)``."""
    return grid.kappa * np.exp(-2j * np.pi * np.outer(grid.xi, grid.x))


def direct_ft(grid, values):
    """Direct-sum transform, separable in the two axes."""
    M = dft_matrix(grid)
    return M @ values @ M.T


@pytest.fixture(scope="session")
def grid256():
    return Grid2D(256, 10.0)


@pytest.fixture(scope="session")
def grid64():
    return Grid2D(64, 10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
