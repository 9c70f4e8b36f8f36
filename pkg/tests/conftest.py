"""Shared fixtures: the two reference potentials on the 2001-point grids.

Session-scoped so the acceptance gate and the unit tests reuse one solve.
"""

import numpy as np
import pytest

from qinfluence import (
    Free,
    Grid,
    Harmonic,
    VariationalOptions,
    minimize_functional,
    solve_spectrum,
)

BOX_GRID = Grid(0.0, np.pi, 2001, "dirichlet")
HARMONIC_GRID = Grid(-10.0, 10.0, 2001, "dirichlet")


@pytest.fixture(scope="session")
def box_grid():
    return BOX_GRID


@pytest.fixture(scope="session")
def harmonic_grid():
    return HARMONIC_GRID


@pytest.fixture(scope="session")
def box_spectrum():
    return solve_spectrum(Free(), BOX_GRID, 6)


@pytest.fixture(scope="session")
def harmonic_spectrum():
    return solve_spectrum(Harmonic(2.0), HARMONIC_GRID, 6)


@pytest.fixture(scope="session")
def box_variational():
    return minimize_functional(Free(), BOX_GRID, 4, VariationalOptions(seed=7))


@pytest.fixture(scope="session")
def harmonic_variational():
    return minimize_functional(Harmonic(2.0), HARMONIC_GRID, 4, VariationalOptions(seed=7))
