"""Two-slit detector patterns: one energy, two bases, three visibilities.

Each slit sources an outgoing cylindrical wave psi_i(x) = e^{i kappa r_i}
/ sqrt(r_i) at the common energy E = kappa^2, evaluated along a screen of
detector bins.  The particle pattern weighs the two intensities
|alpha_i|^2 |psi_i|^2 (individual-slit basis); the wave pattern squares
the coherent sum |alpha_1 psi_1 + alpha_2 psi_2|^2 (superposition basis)
and carries the interference cross term; the partial pattern mixes the
two normalized patterns with weight eta.  Far-field fringes land at the
classic spacing lambda L / d with lambda = 2 pi / kappa.

Geometry: slit 1 sits at (0, +d/2), slit 2 at (0, -d/2), the screen is
the vertical line at distance L, sampled at bin midpoints over
[-W, +W].  All evaluation is deterministic; sampling detector hits is
deterministic per seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MODE_INDIVIDUAL = "individual"
MODE_FULL = "full"
MODE_PARTIAL = "partial"
_MODES = (MODE_INDIVIDUAL, MODE_FULL, MODE_PARTIAL)


@dataclass(frozen=True)
class SlitConfig:
    """Geometry, amplitudes and visibility mode of one experiment."""

    slit_separation: float      # d
    screen_distance: float      # L
    wavenumber: float           # kappa, energy E = kappa^2
    screen_halfwidth: float     # W
    bins: int
    alpha1: complex
    alpha2: complex
    mode: str = MODE_FULL
    eta: float | None = None    # partial-visibility weight, partial mode only

    def __post_init__(self):
        for name in ("slit_separation", "screen_distance", "wavenumber", "screen_halfwidth"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.bins < 16:
            raise ValueError(f"bins must be >= 16, got {self.bins}")
        weight = abs(self.alpha1) ** 2 + abs(self.alpha2) ** 2
        if abs(weight - 1.0) > 1e-10:
            raise ValueError(
                f"|alpha1|^2 + |alpha2|^2 must be 1, deviates by {weight - 1.0:.3e}"
            )
        if self.mode not in _MODES:
            raise ValueError(f"unknown mode {self.mode!r}, pick one of {_MODES}")
        if self.mode == MODE_PARTIAL:
            if self.eta is None or not 0.0 <= self.eta <= 1.0:
                raise ValueError(f"partial mode needs eta in [0, 1], got {self.eta}")
        elif self.eta is not None:
            raise ValueError(f"eta only applies to partial mode, got mode {self.mode!r}")

    @property
    def bin_centers(self) -> np.ndarray:
        width = 2.0 * self.screen_halfwidth / self.bins
        return -self.screen_halfwidth + (np.arange(self.bins) + 0.5) * width

    @property
    def fringe_spacing(self) -> float:
        """Far-field prediction lambda L / d."""
        lam = 2.0 * np.pi / self.wavenumber
        return lam * self.screen_distance / self.slit_separation


@dataclass(frozen=True, eq=False)
class DetectorPattern:
    """Binned screen distribution: normalized probabilities plus the raw intensity."""

    bin_centers: np.ndarray
    probabilities: np.ndarray
    intensity: np.ndarray

    def __post_init__(self):
        centers = np.asarray(self.bin_centers, dtype=float)
        probs = np.asarray(self.probabilities, dtype=float)
        inten = np.asarray(self.intensity, dtype=float)
        if not (centers.shape == probs.shape == inten.shape) or centers.ndim != 1:
            raise ValueError("bin_centers, probabilities and intensity must share one length")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        total = probs.sum()
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities must sum to 1, got {total!r}")
        for arr in (centers, probs, inten):
            arr.flags.writeable = False
        object.__setattr__(self, "bin_centers", centers)
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "intensity", inten)

    @property
    def bins(self) -> int:
        return len(self.bin_centers)


def slit_field(slit_index: int, config: SlitConfig) -> np.ndarray:
    """Amplitudes of the chosen slit's wave at the bin centers."""
    if slit_index not in (1, 2):
        raise ValueError(f"slit_index must be 1 or 2, got {slit_index}")
    offset = 0.5 * config.slit_separation if slit_index == 1 else -0.5 * config.slit_separation
    x = config.bin_centers
    r = np.hypot(config.screen_distance, x - offset)
    return np.exp(1j * config.wavenumber * r) / np.sqrt(r)


def _normalized_pattern(config: SlitConfig, intensity: np.ndarray) -> DetectorPattern:
    return DetectorPattern(config.bin_centers, intensity / intensity.sum(), intensity)


def pattern_particle(config: SlitConfig) -> DetectorPattern:
    """Individual-slit basis: intensity |a1|^2 |psi1|^2 + |a2|^2 |psi2|^2."""
    i1 = np.abs(slit_field(1, config)) ** 2
    i2 = np.abs(slit_field(2, config)) ** 2
    intensity = abs(config.alpha1) ** 2 * i1 + abs(config.alpha2) ** 2 * i2
    return _normalized_pattern(config, intensity)


def pattern_wave(config: SlitConfig) -> DetectorPattern:
    """Superposition basis: intensity |a1 psi1 + a2 psi2|^2, fringes included."""
    field = config.alpha1 * slit_field(1, config) + config.alpha2 * slit_field(2, config)
    return _normalized_pattern(config, np.abs(field) ** 2)


def pattern_partial(config: SlitConfig) -> DetectorPattern:
    """Convex mixture eta * wave + (1 - eta) * particle of the normalized patterns."""
    if config.mode != MODE_PARTIAL:
        raise ValueError(f"pattern_partial needs mode 'partial', got {config.mode!r}")
    wave = pattern_wave(config)
    particle = pattern_particle(config)
    eta = config.eta
    probs = eta * wave.probabilities + (1.0 - eta) * particle.probabilities
    intensity = eta * wave.intensity + (1.0 - eta) * particle.intensity
    return DetectorPattern(config.bin_centers, probs, intensity)


@dataclass(frozen=True)
class FringeMetrics:
    """Measured fringe spacing (None when fewer than 3 interior maxima) and visibility."""

    spacing: float | None
    visibility: float


def _interior_extrema(values: np.ndarray):
    """Indices of interior local maxima and minima, plateau-aware.

    Exact ties happen systematically (a symmetric pattern over an even bin
    count puts its central peak on two equal samples), so slope signs are
    forward-filled across flat runs before looking for sign changes.
    """
    slope = np.sign(np.diff(values))
    nonzero = slope != 0
    if not nonzero.any():
        return np.array([], dtype=int), np.array([], dtype=int)
    pos = np.where(nonzero, np.arange(len(slope)), -1)
    last = np.maximum.accumulate(pos)
    filled = np.where(last >= 0, slope[np.maximum(last, 0)], 0.0)
    before, after = filled[:-1], filled[1:]
    maxima = np.nonzero((before > 0) & (after < 0))[0] + 1
    minima = np.nonzero((before < 0) & (after > 0))[0] + 1
    return maxima, minima


def _refine_peak(x: np.ndarray, p: np.ndarray, k: int) -> float:
    """Parabolic sub-bin interpolation of the extremum position at bin k."""
    denom = p[k - 1] - 2.0 * p[k] + p[k + 1]
    if denom == 0.0:
        return float(x[k])
    shift = 0.5 * (p[k - 1] - p[k + 1]) / denom
    return float(x[k] + shift * (x[1] - x[0]))


def fringe_metrics(pattern: DetectorPattern) -> FringeMetrics:
    """Mean spacing of interior probability maxima and central-fringe visibility.

    Spacing needs at least 3 interior maxima and is reported absent (None)
    otherwise.  Visibility compares the maximum nearest the screen center
    with the adjacent interior minimum; a pattern without interior extrema
    falls back to the global max/min contrast, so a flat pattern reads 0.
    """
    x = pattern.bin_centers
    p = pattern.probabilities
    maxima, minima = _interior_extrema(p)
    spacing = None
    if len(maxima) >= 3:
        positions = np.array([_refine_peak(x, p, k) for k in maxima])
        spacing = float(np.mean(np.diff(positions)))

    if len(maxima) >= 1 and len(minima) >= 1:
        central = maxima[np.argmin(np.abs(x[maxima]))]
        neighbor = minima[np.argmin(np.abs(minima - central))]
        p_max, p_min = p[central], p[neighbor]
    else:
        p_max, p_min = float(p.max()), float(p.min())
    if p_max + p_min == 0.0:
        visibility = 0.0
    else:
        visibility = float((p_max - p_min) / (p_max + p_min))
    return FringeMetrics(spacing, visibility)


def sample_hits(pattern: DetectorPattern, n: int, seed: int) -> np.ndarray:
    """n detector hits by inverse-CDF sampling; counts per bin, summing to n.

    The same seed always reproduces the same counts.
    """
    if n < 1:
        raise ValueError(f"need n >= 1 hits, got {n}")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(pattern.probabilities)
    cdf[-1] = 1.0  # guard the roundoff tail
    draws = rng.random(n)
    idx = np.searchsorted(cdf, draws, side="right")
    return np.bincount(idx, minlength=pattern.bins)
