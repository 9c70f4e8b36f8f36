"""Constrained minimization of the energy functional on the unit sphere.

The objective is the Rayleigh quotient <psi, H psi> subject to
integrate(|psi|^2) = 1; the multiplier enforcing the constraint is the
energy, read off at convergence as that quotient.  State j is kept
orthogonal to the already-converged states 0..j-1 (Gram-Schmidt
deflation), so the minimizer produces the same orthonormal low-energy set
as the direct eigensolver -- the two modules are independent solution
routes through the identical discrete operator.

The iteration is projected gradient descent with step halving whenever a
trial step would raise the objective, so the recorded value sequence is
non-increasing by construction.  The descent direction is the constrained
gradient preconditioned by (H + sigma)^-1 (an SPD change of metric applied
by a banded or sparse solve): a fixed Euclidean step stalls on fine grids
because the operator norm grows like 1/h^2, while the preconditioned step
converges in tens of iterations and leaves monotonicity, determinism and
the finite-difference gradient identity untouched.

Fields are real on dirichlet grids and complex on periodic ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .grid import DIRICHLET, Grid, ScalarField, _quad, derivative, inner_product
from .hamiltonian import Potential, _apply_restricted, evaluate_potential
from .eigensolver import (
    ConvergenceError,
    EigenPair,
    Spectrum,
    _dof_count,
    _embed_dofs,
    _fd_matvec,
    _fix_sign,
    _potential_dofs,
)

_LINE_SEARCH_LIMIT = 60


@dataclass(frozen=True)
class VariationalOptions:
    """Knobs of the minimizer; defaults suit desk-scale grids.

    ``tol`` bounds the quadrature-metric norm of the constrained gradient
    ||H psi - E psi||.  The energy error it implies is ~ tol^2 / gap, so
    the 1e-7 default leaves the recovered multiplier many orders tighter
    than the 1e-6 cross-check against the direct eigensolver; demanding
    much less than 1e-7 runs into the float noise floor of the objective
    on fine grids, where strict descent steps stop existing.
    """

    step: float = 1.0
    max_iters: int = 500
    tol: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")


@dataclass(frozen=True)
class MinimizeHistory:
    """Per-iteration record of one state's descent."""

    energies: np.ndarray          # objective value at init and after each accepted step
    constraint_error: np.ndarray  # | integrate(|psi|^2) - 1 | after each iteration


def _require_normalized(psi: ScalarField, tol: float = 1e-8) -> None:
    dev = abs(inner_product(psi, psi).real - 1.0)
    if dev > tol:
        raise ValueError(f"field is not normalized: | |psi|^2 - 1 | = {dev:.3e}")


def functional_value(psi: ScalarField, potential: Potential) -> float:
    """integrate(|dpsi/dq|^2 + V |psi|^2) for a normalized field.

    The kinetic term uses the magnitude-squared first derivative; for
    fields vanishing at dirichlet walls this agrees with <psi, H psi> up
    to the O(h^2) difference between the two quadratures.
    """
    _require_normalized(psi)
    v = evaluate_potential(potential, psi.grid).values.real
    dens = np.abs(derivative(psi).values) ** 2 + v * np.abs(psi.values) ** 2
    return float(_quad(psi.grid, dens).real)


def lagrange_multiplier(psi: ScalarField, potential: Potential) -> float:
    """Energy of a normalized state: the Rayleigh quotient <psi, H psi>.

    This is the multiplier recovered from the normalization constraint; at
    an exact discrete eigenstate it equals the eigenvalue to roundoff.
    """
    _require_normalized(psi)
    hpsi = _apply_restricted(potential, psi)
    return float(_quad(psi.grid, np.conj(psi.values) * hpsi).real)


def _preconditioner(potential: Potential, grid: Grid):
    """Solver for (H + sigma) d = r with sigma making the matrix SPD."""
    v = _potential_dofs(potential, grid)
    sigma = 1.0 + max(0.0, -float(v.min()))
    inv_h2 = 1.0 / grid.h ** 2
    diag = 2.0 * inv_h2 + v + sigma
    n_dof = len(diag)
    if grid.boundary == DIRICHLET:
        ab = np.zeros((2, n_dof))
        ab[0, 1:] = -inv_h2
        ab[1, :] = diag
        chol = scipy.linalg.cholesky_banded(ab)

        def solve(r):
            return scipy.linalg.cho_solve_banded((chol, False), r)

    else:
        idx = np.arange(n_dof)
        mat = scipy.sparse.csc_matrix(
            (
                np.concatenate([diag, np.full(n_dof, -inv_h2), np.full(n_dof, -inv_h2)]),
                (
                    np.concatenate([idx, idx, idx]),
                    np.concatenate([idx, (idx + 1) % n_dof, (idx - 1) % n_dof]),
                ),
            ),
            shape=(n_dof, n_dof),
        )
        lu = scipy.sparse.linalg.factorized(mat)

        def solve(r):
            if np.iscomplexobj(r):
                return lu(r.real) + 1j * lu(r.imag)
            return lu(r)

    return solve


def _project_out(basis: list[np.ndarray], x: np.ndarray) -> np.ndarray:
    for b in basis:
        x = x - (b.conj() @ x) * b
    return x


def _descend(matvec, precond, basis, y0, opts: VariationalOptions, sqrt_h: float):
    """Minimize the Rayleigh quotient over the unit sphere orthogonal to basis."""
    y = _project_out(basis, y0)
    nrm = np.linalg.norm(y)
    if nrm < 1e-12:
        raise ValueError("initial state vanishes inside the search subspace")
    y = y / nrm
    hy = matvec(y)
    energy = float(np.real(np.vdot(y, hy)))
    energies = [energy]
    constraint = [abs(float(np.vdot(y, y).real) - 1.0)]
    for _ in range(opts.max_iters):
        grad = hy - energy * y
        grad = _project_out(basis, grad)
        grad_norm = sqrt_h * float(np.linalg.norm(grad))  # quadrature metric
        if grad_norm <= opts.tol:
            return y, energy, np.array(energies), np.array(constraint)
        direction = _project_out(basis, precond(grad))
        direction = direction - np.vdot(y, direction) * y
        step = opts.step
        accepted = False
        for _ in range(_LINE_SEARCH_LIMIT):
            cand = _project_out(basis, y - step * direction)
            nrm = np.linalg.norm(cand)
            if nrm < 1e-12:
                step *= 0.5
                continue
            cand = cand / nrm
            hcand = matvec(cand)
            cand_energy = float(np.real(np.vdot(cand, hcand)))
            if cand_energy <= energy:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break  # descent exhausted at the numerical floor
        y, hy, energy = cand, hcand, cand_energy
        energies.append(energy)
        constraint.append(abs(float(np.vdot(y, y).real) - 1.0))
    grad = _project_out(basis, matvec(y) - energy * y)
    grad_norm = sqrt_h * float(np.linalg.norm(grad))
    if grad_norm <= opts.tol:
        return y, energy, np.array(energies), np.array(constraint)
    raise ConvergenceError(
        f"no convergence within {opts.max_iters} iterations "
        f"(gradient norm {grad_norm:.3e}, tol {opts.tol:.3e})",
        residual=grad_norm,
    )


def minimize_functional(
    potential: Potential,
    grid: Grid,
    m: int,
    opts: VariationalOptions,
    initial: list[ScalarField] | None = None,
    return_history: bool = False,
):
    """Lowest m states by constrained descent, as a Spectrum.

    Initialization is drawn from a generator seeded with opts.seed (or
    taken from ``initial`` where provided, e.g. to restart from a known
    state), then orthogonalized against the already-converged states.
    With ``return_history`` the per-state iteration records come back as a
    second value.
    """
    n_dof = _dof_count(grid)
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if m > n_dof:
        raise ValueError(
            f"m={m} exceeds the {n_dof} degrees of freedom of this grid"
        )
    matvec = _fd_matvec(potential, grid)
    precond = _preconditioner(potential, grid)
    complex_dofs = grid.boundary != DIRICHLET
    rng = np.random.default_rng(opts.seed)
    sqrt_h = np.sqrt(grid.h)

    basis: list[np.ndarray] = []
    results = []
    histories = []
    for j in range(m):
        if initial is not None and j < len(initial):
            if initial[j].grid != grid:
                raise ValueError(f"initial state {j} lives on a different grid")
            y0 = initial[j].values * sqrt_h
            if grid.boundary == DIRICHLET:
                y0 = y0[1:-1].real  # dirichlet states are real-valued here
        else:
            y0 = rng.standard_normal(n_dof)
            if complex_dofs:
                y0 = y0 + 1j * rng.standard_normal(n_dof)
        y, energy, energies, constraint = _descend(
            matvec, precond, basis, y0, opts, sqrt_h
        )
        basis.append(y)
        results.append((energy, _fix_sign(y)))
        histories.append(MinimizeHistory(energies, constraint))

    order = sorted(range(m), key=lambda i: results[i][0])
    pairs = tuple(
        EigenPair(results[i][0], ScalarField(grid, _embed_dofs(grid, results[i][1])))
        for i in order
    )
    spectrum = Spectrum(pairs)
    if return_history:
        return spectrum, [histories[i] for i in order]
    return spectrum
