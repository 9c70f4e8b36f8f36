"""Influence functions g = k ln(psi) and observability diagnostics.

The log map sends a wavefield to the influence function g whose gradient
is the momentum imparted to the surrounding system; with k = hbar/i = -i
in package units a plane wave e^{i kappa q} maps to the real linear ramp
g = kappa q.  A state is *observable* when it behaves like a single-energy
boundary condition: its energy dispersion <H^2> - <H>^2 vanishes and it
satisfies the stationary equation at the assigned energy.  Superpositions
of distinct energies fail both tests; combinations inside a degenerate
eigenspace pass them, which is exactly the double-slit basis freedom
exercised by the doubleslit module.

The complex logarithm is undefined at nodes of psi.  The operations here
refuse (NodeError, listing the offending sample indices) rather than
regularize; note a hard-wall eigenstate always trips this at the wall
samples, so log-map diagnostics want periodic states or strictly positive
tabulated fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import DIRICHLET, PERIODIC, Grid, ScalarField, _quad, derivative, inner_product
from .hamiltonian import Potential, _apply_restricted, evaluate_potential

# k = hbar / i in natural units
K_CONSTANT = complex(0.0, -1.0)


class NodeError(ValueError):
    """The field magnitude dropped below the node threshold somewhere."""

    def __init__(self, indices: np.ndarray, node_eps: float):
        self.indices = tuple(int(i) for i in indices)
        self.node_eps = node_eps
        shown = ", ".join(str(i) for i in self.indices[:8])
        if len(self.indices) > 8:
            shown += ", ..."
        super().__init__(
            f"|psi| < {node_eps:g} at {len(self.indices)} sample(s): [{shown}] "
            f"(log map undefined at nodes)"
        )


@dataclass(frozen=True, eq=False)
class InfluenceFunction:
    """Samples of g(q) at fixed time, with the log-map constant k.

    ``winding`` is the accumulated phase winding number around a periodic
    grid (always 0 on dirichlet grids); it makes the momentum of a plane
    wave single-valued on the ring.
    """

    grid: Grid
    values: np.ndarray
    k_constant: complex = K_CONSTANT
    winding: int = 0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.n,):
            raise ValueError(
                f"influence needs {self.grid.n} samples, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("influence contains non-finite samples")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class ConsistencyReport:
    """Quantified observability of a state at an assigned energy."""

    assigned_energy: float
    mean_energy: float
    energy_variance: float
    el_residual: float
    observable: bool
    tolerance: float

    def __post_init__(self):
        if self.energy_variance < -1e-10:
            raise ValueError(
                f"energy variance below the numerical floor: {self.energy_variance:.3e}"
            )
        expected = (
            self.energy_variance <= self.tolerance
            and self.el_residual <= self.tolerance
        )
        if self.observable != expected:
            raise ValueError("observable flag contradicts variance/residual values")


def _check_nodes(psi: ScalarField, node_eps: float) -> np.ndarray:
    if not node_eps > 0:
        raise ValueError(f"node_eps must be positive, got {node_eps}")
    mags = np.abs(psi.values)
    bad = np.nonzero(mags < node_eps)[0]
    if bad.size:
        raise NodeError(bad, node_eps)
    return mags


def _wrap_phase_steps(deltas: np.ndarray) -> np.ndarray:
    """Map phase increments into (-pi, pi]."""
    wrapped = (deltas + np.pi) % (2.0 * np.pi) - np.pi
    wrapped[wrapped == -np.pi] = np.pi
    return wrapped


def influence_from_wavefield(
    psi: ScalarField, node_eps: float = 1e-12
) -> InfluenceFunction:
    """Log map g = k (ln|psi| + i theta) with theta unwrapped along the grid.

    The phase is continued sequentially from index 0, each increment
    wrapped into (-pi, pi]; on periodic grids the winding number picked up
    around the ring is stored on the result.
    """
    mags = _check_nodes(psi, node_eps)
    theta_raw = np.angle(psi.values)
    steps = _wrap_phase_steps(np.diff(theta_raw))
    theta = np.empty_like(theta_raw)
    theta[0] = theta_raw[0]
    theta[1:] = theta_raw[0] + np.cumsum(steps)
    winding = 0
    if psi.grid.boundary == PERIODIC:
        closing = _wrap_phase_steps(np.array([theta_raw[0] - theta_raw[-1]]))[0]
        winding = int(round((theta[-1] + closing - theta[0]) / (2.0 * np.pi)))
    g = K_CONSTANT * (np.log(mags) + 1j * theta)
    return InfluenceFunction(psi.grid, g, K_CONSTANT, winding)


def momentum_field(g: InfluenceFunction) -> ScalarField:
    """Momentum p = dg/dq as a field (complex in general).

    On a periodic grid with nonzero winding the linear winding ramp is
    removed before differencing and its constant slope added back, so the
    multivalued part of g never crosses the wraparound stencil.
    """
    grid = g.grid
    if grid.boundary == PERIODIC and g.winding != 0:
        span = grid.h * grid.n
        slope = 2.0 * np.pi * g.winding / span
        ramp = slope * (grid.points - grid.q_min)
        base = ScalarField(grid, g.values - ramp)
        return ScalarField(grid, derivative(base).values + slope)
    return derivative(ScalarField(grid, g.values))


def pointwise_hj_residual(
    psi: ScalarField, energy: float, potential: Potential, node_eps: float = 1e-12
) -> ScalarField:
    """Stationary consistency defect R(q) = -(psi'/psi)^2 + V(q) - E.

    Vanishes identically (to O(h^2)) for a plane wave in free space at
    E = kappa^2; for an exact eigenstate it reproduces the curvature of
    ln psi, the term separating the quantum condition from its classical
    counterpart.
    """
    _check_nodes(psi, node_eps)
    log_deriv = derivative(psi).values / psi.values
    v = evaluate_potential(potential, psi.grid).values.real
    return ScalarField(psi.grid, -(log_deriv ** 2) + v - energy)


def energy_moments(psi: ScalarField, potential: Potential) -> tuple[float, float]:
    """(<H>, <H^2> - <H>^2) for a normalized state.

    Dirichlet grids use the hard-wall (interior) rows of the operator.  A
    variance within -1e-10 of zero is clamped to 0.
    """
    dev = abs(inner_product(psi, psi).real - 1.0)
    if dev > 1e-8:
        raise ValueError(f"field is not normalized: | |psi|^2 - 1 | = {dev:.3e}")
    hpsi = _apply_restricted(potential, psi)
    mean = float(_quad(psi.grid, np.conj(psi.values) * hpsi).real)
    second = float(_quad(psi.grid, np.abs(hpsi) ** 2).real)
    variance = second - mean * mean
    if -1e-10 <= variance < 0.0:
        variance = 0.0
    return mean, variance


def observability_verdict(
    psi: ScalarField, assigned_energy: float, potential: Potential, tol: float
) -> ConsistencyReport:
    """Decide whether the state acts as a single-energy influence.

    observable is true iff the energy variance and the stationary residual
    || H psi - E psi || both fall within tol.
    """
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    mean, variance = energy_moments(psi, potential)
    resid = _apply_restricted(potential, psi) - assigned_energy * psi.values
    if psi.grid.boundary == DIRICHLET:
        resid = resid.copy()
        resid[0] = 0.0
        resid[-1] = 0.0
    el_residual = float(np.sqrt(_quad(psi.grid, np.abs(resid) ** 2).real))
    observable = variance <= tol and el_residual <= tol
    return ConsistencyReport(
        assigned_energy=float(assigned_energy),
        mean_energy=mean,
        energy_variance=variance,
        el_residual=el_residual,
        observable=observable,
        tolerance=float(tol),
    )


def time_evolve_phase(psi: ScalarField, energy: float, t: float) -> ScalarField:
    """Attach the decoupled time factor: e^{-i E t} psi."""
    return ScalarField(psi.grid, np.exp(-1j * energy * t) * psi.values)
