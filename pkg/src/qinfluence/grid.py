"""Uniform 1-D grids, finite-difference stencils and quadrature.

Everything else in the package computes on these two types: a ``Grid``
fixes the sample lattice of the configuration coordinate q, and a
``ScalarField`` holds complex samples of a function on that lattice.
Natural units are used throughout (hbar = 1, kinetic operator -d^2/dq^2).

Both types are immutable after construction and all operations are pure
functions, so values can be shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DIRICHLET = "dirichlet"
PERIODIC = "periodic"


@dataclass(frozen=True)
class Grid:
    """Uniform lattice of n samples on [q_min, q_max].

    Dirichlet grids include both endpoints (spacing (q_max - q_min)/(n - 1));
    the sample just outside each wall is treated as zero, i.e. a hard-wall
    box.  Periodic grids cover [q_min, q_max) with spacing
    (q_max - q_min)/n and wrap around.
    """

    q_min: float
    q_max: float
    n: int
    boundary: str = DIRICHLET

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"grid needs n >= 3, got n={self.n}")
        if not self.q_max > self.q_min:
            raise ValueError(f"q_max must exceed q_min, got [{self.q_min}, {self.q_max}]")
        if self.boundary not in (DIRICHLET, PERIODIC):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")

    @property
    def h(self) -> float:
        span = self.q_max - self.q_min
        if self.boundary == DIRICHLET:
            return span / (self.n - 1)
        return span / self.n

    @property
    def points(self) -> np.ndarray:
        if self.boundary == DIRICHLET:
            return np.linspace(self.q_min, self.q_max, self.n)
        return self.q_min + self.h * np.arange(self.n)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Complex samples of a function on a Grid, one value per grid point."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n,):
            raise ValueError(
                f"field needs {self.grid.n} samples, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("field contains non-finite samples")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


def _quad(grid: Grid, values: np.ndarray) -> complex:
    # Trapezoid rule on dirichlet grids, rectangle rule on periodic ones.
    h = grid.h
    if grid.boundary == PERIODIC:
        return complex(h * values.sum())
    return complex(h * (0.5 * values[0] + values[1:-1].sum() + 0.5 * values[-1]))


def derivative(f: ScalarField) -> ScalarField:
    """First derivative, second-order accurate.

    Central differences on interior points, one-sided three-point stencils
    at dirichlet edges, wraparound indexing on periodic grids.
    """
    v = f.values
    h = f.grid.h
    if f.grid.boundary == PERIODIC:
        out = (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * h)
    else:
        out = np.empty_like(v)
        out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return ScalarField(f.grid, out)


def laplacian(f: ScalarField) -> ScalarField:
    """Second derivative by the 3-point stencil (f[i-1] - 2f[i] + f[i+1])/h^2.

    Dirichlet grids use ghost value 0 beyond each wall; periodic grids wrap.
    """
    v = f.values
    h2 = f.grid.h ** 2
    if f.grid.boundary == PERIODIC:
        out = (np.roll(v, -1) - 2.0 * v + np.roll(v, 1)) / h2
    else:
        out = np.empty_like(v)
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / h2
        out[0] = (v[1] - 2.0 * v[0]) / h2
        out[-1] = (v[-2] - 2.0 * v[-1]) / h2
    return ScalarField(f.grid, out)


def integrate(f: ScalarField) -> complex:
    """Quadrature of f over the whole domain (linear in f)."""
    return _quad(f.grid, f.values)


def inner_product(f: ScalarField, g: ScalarField) -> complex:
    """L2 inner product <f, g> = integrate(conj(f) * g).

    Conjugate-linear in the first argument, linear in the second.  The two
    fields must live on the same grid.
    """
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    return _quad(f.grid, np.conj(f.values) * g.values)


def norm(f: ScalarField) -> float:
    """sqrt of integrate(|f|^2)."""
    return float(np.sqrt(inner_product(f, f).real))


def normalized(f: ScalarField) -> ScalarField:
    """Rescale f so that integrate(|f|^2) = 1."""
    scale = norm(f)
    if scale == 0.0:
        raise ValueError("cannot normalize the zero field")
    return ScalarField(f.grid, f.values / scale)
