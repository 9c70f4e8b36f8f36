"""Direct solution of the stationary equation H psi = E psi on the grid.

The finite-difference operator is assembled as a symmetric matrix --
tridiagonal on the interior points for dirichlet grids (hard walls pin the
boundary samples to zero, hence m <= n - 2 states), circulant-like with
wraparound corners for periodic grids -- and diagonalized with LAPACK's
deterministic symmetric drivers.  Returned states are normalized under the
grid quadrature, orthonormalized in index order inside degenerate groups,
and sign-fixed so results are reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .grid import DIRICHLET, Grid, ScalarField, _quad, inner_product
from .hamiltonian import Potential, apply_hamiltonian, evaluate_potential


class ConvergenceError(RuntimeError):
    """An iterative or factorization step failed to reach its threshold.

    Carries the offending residual (or gradient) norm when one is known.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True, eq=False)
class EigenPair:
    """One energy eigenvalue with its grid-sampled eigenstate."""

    energy: float
    state: ScalarField

    def __post_init__(self):
        nrm2 = inner_product(self.state, self.state).real
        if abs(nrm2 - 1.0) > 1e-10:
            raise ValueError(f"eigenstate norm^2 deviates from 1 by {nrm2 - 1.0:.3e}")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending, orthonormal sequence of eigenpairs on a common grid."""

    pairs: tuple[EigenPair, ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if not self.pairs:
            raise ValueError("spectrum must contain at least one pair")
        energies = self.energies
        scale = np.maximum(1.0, np.abs(energies[:-1]))
        if np.any(np.diff(energies) < -1e-10 * scale):
            raise ValueError("energies must be ascending (ties allowed)")
        gram = self.gram_matrix()
        dev = np.max(np.abs(gram - np.eye(len(self.pairs))))
        if dev > 1e-8:
            raise ValueError(f"states are not orthonormal, gram deviation {dev:.3e}")

    @property
    def energies(self) -> np.ndarray:
        return np.array([p.energy for p in self.pairs])

    def gram_matrix(self) -> np.ndarray:
        states = [p.state for p in self.pairs]
        m = len(states)
        gram = np.empty((m, m), dtype=complex)
        for i in range(m):
            for j in range(m):
                gram[i, j] = inner_product(states[i], states[j])
        return gram

    def __len__(self) -> int:
        return len(self.pairs)

    def __getitem__(self, i: int) -> EigenPair:
        return self.pairs[i]


# -- internal assembly helpers (shared with the variational module so both
#    solution routes act on the identical discrete operator) --------------

def _dof_count(grid: Grid) -> int:
    return grid.n - 2 if grid.boundary == DIRICHLET else grid.n


def _potential_dofs(potential: Potential, grid: Grid) -> np.ndarray:
    v = evaluate_potential(potential, grid).values.real
    return v[1:-1] if grid.boundary == DIRICHLET else v


def _fd_matvec(potential: Potential, grid: Grid):
    """Return x -> Hx acting on the solver's degree-of-freedom vector."""
    v = _potential_dofs(potential, grid)
    inv_h2 = 1.0 / grid.h ** 2
    diag = 2.0 * inv_h2 + v
    if grid.boundary == DIRICHLET:

        def matvec(x):
            y = diag * x
            y[1:] -= inv_h2 * x[:-1]
            y[:-1] -= inv_h2 * x[1:]
            return y

    else:

        def matvec(x):
            return diag * x - inv_h2 * (np.roll(x, 1) + np.roll(x, -1))

    return matvec


def _embed_dofs(grid: Grid, x: np.ndarray) -> np.ndarray:
    """Lift a dof vector to full grid samples, quadrature-normalized."""
    if grid.boundary == DIRICHLET:
        full = np.zeros(grid.n, dtype=x.dtype)
        full[1:-1] = x
    else:
        full = np.asarray(x)
    return full / np.sqrt(grid.h)


def _fix_sign(col: np.ndarray) -> np.ndarray:
    """Make the first significant component real and positive."""
    mags = np.abs(col)
    idx = int(np.argmax(mags > 1e-12 * mags.max()))
    pivot = col[idx]
    if np.iscomplexobj(col):
        return col * (abs(pivot) / pivot)
    return col if pivot > 0 else -col


def _orthonormalize_groups(energies: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Stable Gram-Schmidt inside near-degenerate groups, in index order."""
    cols = cols.copy()
    m = len(energies)
    start = 0
    while start < m:
        stop = start + 1
        while stop < m and abs(energies[stop] - energies[stop - 1]) <= 1e-9 * max(
            1.0, abs(energies[stop])
        ):
            stop += 1
        for j in range(start, stop):
            for k in range(start, j):
                cols[:, j] -= (cols[:, k].conj() @ cols[:, j]) * cols[:, k]
            cols[:, j] /= np.linalg.norm(cols[:, j])
        start = stop
    return cols


def solve_spectrum(potential: Potential, grid: Grid, m: int) -> Spectrum:
    """Lowest m eigenpairs of the discrete Hamiltonian, ascending.

    States come back normalized under ``integrate``; degenerate subspaces
    get an orthonormal basis fixed in index order; output is deterministic
    for a fixed grid and m.
    """
    n_dof = _dof_count(grid)
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if m > n_dof:
        raise ValueError(
            f"m={m} exceeds the {n_dof} degrees of freedom of this grid "
            f"({grid.boundary}, n={grid.n})"
        )
    v = _potential_dofs(potential, grid)
    inv_h2 = 1.0 / grid.h ** 2
    diag = 2.0 * inv_h2 + v
    try:
        if grid.boundary == DIRICHLET:
            off = np.full(n_dof - 1, -inv_h2)
            energies, cols = scipy.linalg.eigh_tridiagonal(
                diag, off, select="i", select_range=(0, m - 1)
            )
        else:
            dense = np.diag(diag)
            idx = np.arange(n_dof)
            dense[idx, (idx + 1) % n_dof] = -inv_h2
            dense[idx, (idx - 1) % n_dof] = -inv_h2
            energies, cols = scipy.linalg.eigh(dense, subset_by_index=(0, m - 1))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigendecomposition failed: {exc}") from exc

    cols = _orthonormalize_groups(energies, cols)
    pairs = []
    for j in range(m):
        col = _fix_sign(cols[:, j])
        state = ScalarField(grid, _embed_dofs(grid, col))
        pairs.append(EigenPair(float(energies[j]), state))
    return Spectrum(tuple(pairs))


def residual_norm(pair: EigenPair, potential: Potential) -> float:
    """|| H psi - E psi || under the grid quadrature.

    Dirichlet grids exclude the wall samples: the ghost-zero stencil rows
    there are not rows of the hard-wall operator.
    """
    grid = pair.state.grid
    r = apply_hamiltonian(potential, pair.state).values - pair.energy * pair.state.values
    if grid.boundary == DIRICHLET:
        r = r.copy()
        r[0] = 0.0
        r[-1] = 0.0
    return float(np.sqrt(_quad(grid, np.abs(r) ** 2).real))
