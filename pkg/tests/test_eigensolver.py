"""Spectra against analytic box/well/ring oracles, residuals, invariants."""

import numpy as np
import pytest

from qinfluence import (
    EigenPair,
    Free,
    Grid,
    Harmonic,
    ScalarField,
    Spectrum,
    normalized,
    residual_norm,
    solve_spectrum,
)


def test_box_spectrum_matches_analytic(box_spectrum):
    # infinite well on [0, pi]: E_n = n^2
    expected = np.array([1.0, 4.0, 9.0, 16.0])
    got = box_spectrum.energies[:4]
    assert np.abs(got - expected).max() / expected.max() < 5e-3
    assert np.all(np.abs(got - expected) / expected < 5e-3)


def test_harmonic_spectrum_matches_analytic(harmonic_spectrum):
    # omega = 2: E_n = 2n + 1
    expected = np.array([1.0, 3.0, 5.0])
    got = harmonic_spectrum.energies[:3]
    assert np.all(np.abs(got - expected) / expected < 5e-3)


def test_periodic_ring_degenerate_pair():
    g = Grid(0.0, 2.0 * np.pi, 401, "periodic")
    spec = solve_spectrum(Free(), g, 3)
    assert abs(spec.energies[0]) <= 1e-9
    e1, e2 = spec.energies[1], spec.energies[2]
    assert abs(e1 - e2) <= 1e-6 * abs(e1)
    assert e1 == pytest.approx(1.0, rel=1e-3)


def test_returned_pairs_have_tiny_residual(box_spectrum, harmonic_spectrum):
    for pair in box_spectrum.pairs:
        assert residual_norm(pair, Free()) <= 1e-8
    for pair in harmonic_spectrum.pairs:
        assert residual_norm(pair, Harmonic(2.0)) <= 1e-8


def test_shifted_energy_residual_is_the_shift(box_spectrum):
    delta = 0.37
    pair = box_spectrum[0]
    shifted = EigenPair(pair.energy + delta, pair.state)
    assert abs(residual_norm(shifted, Free()) - delta) <= 1e-8


def test_random_state_has_positive_residual(harmonic_grid):
    rng = np.random.default_rng(2)
    vals = rng.normal(size=harmonic_grid.n)
    vals[0] = vals[-1] = 0.0
    state = normalized(ScalarField(harmonic_grid, vals))
    pair = EigenPair(1.0, state)
    assert residual_norm(pair, Harmonic(2.0)) > 1e-3


def test_orthonormality_gram(box_spectrum):
    gram = box_spectrum.gram_matrix()
    assert np.abs(gram - np.eye(len(box_spectrum))).max() <= 1e-8


def test_grid_refinement_second_order():
    # E_1 error on the box shrinks ~4x per halving of h
    errors = []
    for n in (251, 501, 1001):
        spec = solve_spectrum(Free(), Grid(0.0, np.pi, n), 1)
        errors.append(abs(spec.energies[0] - 1.0))
    for coarse, fine in zip(errors, errors[1:]):
        assert 3.5 <= coarse / fine <= 4.5


def test_barrier_lifts_box_energies():
    g = Grid(0.0, np.pi, 801)
    free = solve_spectrum(Free(), g, 2)
    from qinfluence import Barrier

    walled = solve_spectrum(Barrier(5.0, 1.0, 2.0), g, 2)
    assert walled.energies[0] > free.energies[0]
    assert walled.energies[1] > free.energies[1]
    assert residual_norm(walled[0], Barrier(5.0, 1.0, 2.0)) <= 1e-8


def test_m_limits():
    g = Grid(0.0, 1.0, 12)
    with pytest.raises(ValueError):
        solve_spectrum(Free(), g, 11)  # dirichlet: at most n - 2
    solve_spectrum(Free(), g, 10)
    gp = Grid(0.0, 1.0, 12, "periodic")
    solve_spectrum(Free(), gp, 12)  # periodic: up to n
    with pytest.raises(ValueError):
        solve_spectrum(Free(), gp, 13)
    with pytest.raises(ValueError):
        solve_spectrum(Free(), g, 0)


def test_deterministic_repeat():
    g = Grid(-5.0, 5.0, 301)
    a = solve_spectrum(Harmonic(2.0), g, 3)
    b = solve_spectrum(Harmonic(2.0), g, 3)
    assert np.array_equal(a.energies, b.energies)
    for pa, pb in zip(a.pairs, b.pairs):
        assert np.array_equal(pa.state.values, pb.state.values)


def test_sign_convention(box_spectrum):
    # first significant component positive: states rise from the left wall
    for pair in box_spectrum.pairs:
        vals = pair.state.values.real
        first = vals[np.nonzero(np.abs(vals) > 1e-12 * np.abs(vals).max())[0][0]]
        assert first > 0


def test_pair_and_spectrum_invariants(box_spectrum, box_grid):
    with pytest.raises(ValueError):
        EigenPair(1.0, ScalarField(box_grid, np.ones(box_grid.n)))  # not normalized
    p0, p1 = box_spectrum[0], box_spectrum[1]
    with pytest.raises(ValueError):
        Spectrum((p1, p0))  # descending energies
    with pytest.raises(ValueError):
        Spectrum((p0, p0))  # not orthonormal
