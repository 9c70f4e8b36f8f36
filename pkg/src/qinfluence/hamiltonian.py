"""Potentials and the discrete Hamiltonian H = -d^2/dq^2 + V(q).

Units: hbar = 1 with the mass factor absorbed into the kinetic term, so a
plane wave e^{i k q} has energy k^2.  The harmonic well is parameterized as
V(q) = (omega * q)^2 / 4, which places its spectrum at E_n = omega*(n + 1/2);
with omega = 2 this is the textbook V = q^2, E_n = 2n + 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .grid import Grid, ScalarField, laplacian


@dataclass(frozen=True)
class Free:
    """V = 0 everywhere."""


@dataclass(frozen=True)
class Harmonic:
    """V(q) = (omega q)^2 / 4, spectrum omega*(n + 1/2)."""

    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"harmonic omega must be positive, got {self.omega}")


@dataclass(frozen=True)
class Barrier:
    """Rectangular step of the given height on [q_lo, q_hi], zero outside."""

    height: float
    q_lo: float
    q_hi: float

    def __post_init__(self):
        if not self.q_lo < self.q_hi:
            raise ValueError(f"barrier needs q_lo < q_hi, got [{self.q_lo}, {self.q_hi}]")


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Explicit real potential samples, one per grid point."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ValueError("tabulated potential must be a 1-D sample array")
        if not np.all(np.isfinite(vals)):
            raise ValueError("tabulated potential contains non-finite samples")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


Potential = Union[Free, Harmonic, Barrier, Tabulated]


def evaluate_potential(potential: Potential, grid: Grid) -> ScalarField:
    """Sample the potential on the grid (real-valued field)."""
    q = grid.points
    if isinstance(potential, Free):
        vals = np.zeros(grid.n)
    elif isinstance(potential, Harmonic):
        vals = 0.25 * (potential.omega * q) ** 2
    elif isinstance(potential, Barrier):
        inside = (q >= potential.q_lo) & (q <= potential.q_hi)
        vals = np.where(inside, potential.height, 0.0)
    elif isinstance(potential, Tabulated):
        if potential.values.shape != (grid.n,):
            raise ValueError(
                f"tabulated potential has {potential.values.shape[0]} samples, "
                f"grid has {grid.n}"
            )
        vals = potential.values
    else:
        raise TypeError(f"not a potential: {potential!r}")
    return ScalarField(grid, vals)


def apply_hamiltonian(potential: Potential, psi: ScalarField) -> ScalarField:
    """Apply H = -laplacian + V to the field, elementwise in the V term."""
    v = evaluate_potential(potential, psi.grid)
    return ScalarField(psi.grid, -laplacian(psi).values + v.values * psi.values)


def _apply_restricted(potential: Potential, psi: ScalarField) -> np.ndarray:
    """H psi with the wall rows zeroed on dirichlet grids.

    The ghost-zero stencil rows at the walls are not rows of the hard-wall
    operator; energies, moments and residuals of dirichlet states are
    defined over the interior rows only.
    """
    out = apply_hamiltonian(potential, psi).values
    if psi.grid.boundary == "dirichlet":
        out = out.copy()
        out[0] = 0.0
        out[-1] = 0.0
    return out
