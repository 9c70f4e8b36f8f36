"""Stationary states as observable influences, on desk-scale 1-D grids.

Three connected products: the stationary equation solved two independent
ways (direct eigendecomposition and constrained functional minimization),
log-map influence functions with the pointwise consistency residual and
an observability verdict for arbitrary states, and the double-slit
detector patterns that realize the particle/wave basis choice inside one
degenerate energy level.  Units: hbar = 1, H = -d^2/dq^2 + V(q).
"""

from .grid import (
    DIRICHLET,
    PERIODIC,
    Grid,
    ScalarField,
    derivative,
    inner_product,
    integrate,
    laplacian,
    norm,
    normalized,
)
from .hamiltonian import (
    Barrier,
    Free,
    Harmonic,
    Potential,
    Tabulated,
    apply_hamiltonian,
    evaluate_potential,
)
from .eigensolver import (
    ConvergenceError,
    EigenPair,
    Spectrum,
    residual_norm,
    solve_spectrum,
)
from .variational import (
    MinimizeHistory,
    VariationalOptions,
    functional_value,
    lagrange_multiplier,
    minimize_functional,
)
from .consistency import (
    K_CONSTANT,
    ConsistencyReport,
    InfluenceFunction,
    NodeError,
    energy_moments,
    influence_from_wavefield,
    momentum_field,
    observability_verdict,
    pointwise_hj_residual,
    time_evolve_phase,
)
from .doubleslit import (
    DetectorPattern,
    FringeMetrics,
    SlitConfig,
    fringe_metrics,
    pattern_partial,
    pattern_particle,
    pattern_wave,
    sample_hits,
    slit_field,
)

__version__ = "0.1.0"
