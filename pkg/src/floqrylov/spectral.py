"""Quasi-energy level statistics on the unit circle.

Spacings are measured between circularly sorted quasi-energies, including
the wraparound gap, and normalized by the mean gap 2 pi / N so their mean
is exactly 1 with no unfolding. Reference curves are the Poisson density
exp(-s) and the Wigner surmise for the Gaussian unitary ensemble,
P(s) = (32 / pi^2) s^2 exp(-4 s^2 / pi). The consecutive-spacing-ratio
statistic avoids unfolding entirely; its GUE reference value is obtained
by sampling random GUE matrices rather than from a closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .maps import QuasiEnergySpectrum


@dataclass(eq=False)
class SpacingHistogram:
    """Normalized spacing density with Poisson and GUE reference curves."""

    centers: np.ndarray
    density: np.ndarray
    poisson_ref: np.ndarray
    gue_ref: np.ndarray
    bin_width: float


@dataclass(eq=False)
class SpectrumStats:
    """Spacings, ratio statistic, and histogram of one spectrum."""

    spacings: np.ndarray
    r_mean: float
    histogram: SpacingHistogram


def level_spacings(spectrum: QuasiEnergySpectrum) -> np.ndarray:
    """All N circular gaps of the spectrum, normalized to unit mean.

    The list ends with the wraparound gap eps_0 + 2 pi - eps_{N-1};
    normalization divides by the exact mean gap 2 pi / N.
    """
    phases = np.sort(np.asarray(spectrum.phases, dtype=np.float64))
    n = phases.size
    if n < 2:
        raise UsageError("need at least two quasi-energies for spacings")
    gaps = np.empty(n, dtype=np.float64)
    gaps[: n - 1] = np.diff(phases)
    gaps[n - 1] = phases[0] + 2 * np.pi - phases[n - 1]
    return gaps * (n / (2 * np.pi))


def r_statistic(spacings: np.ndarray) -> float:
    """Mean ratio min(s_i, s_{i+1}) / max(s_i, s_{i+1}) over cyclic pairs.

    A pair of two zero spacings counts as ratio 1.
    """
    s = np.asarray(spacings, dtype=np.float64)
    if s.ndim != 1 or s.size < 2:
        raise UsageError("need at least two spacings for the ratio statistic")
    if np.any(s < 0):
        raise UsageError("spacings must be non-negative")
    nxt = np.roll(s, -1)
    hi = np.maximum(s, nxt)
    lo = np.minimum(s, nxt)
    ratios = np.where(hi > 0, lo / np.where(hi > 0, hi, 1.0), 1.0)
    return float(ratios.mean())


def poisson_density(s: np.ndarray) -> np.ndarray:
    """Spacing density of an uncorrelated (Poisson) spectrum."""
    return np.exp(-np.asarray(s, dtype=np.float64))


def gue_surmise(s: np.ndarray) -> np.ndarray:
    """Wigner surmise for the Gaussian unitary ensemble."""
    s = np.asarray(s, dtype=np.float64)
    return (32 / np.pi**2) * s**2 * np.exp(-4 * s**2 / np.pi)


def spacing_histogram(
    spacings: np.ndarray, n_bins: int = 30, s_max: float = 4.0
) -> SpacingHistogram:
    """Histogram of spacings over [0, s_max] with reference curves.

    Densities are normalized so bin_width * sum(density) is exactly 1 over
    the spacings that fall inside the range.
    """
    if n_bins < 1:
        raise UsageError(f"n_bins must be >= 1, got {n_bins}")
    if not s_max > 0:
        raise UsageError(f"s_max must be positive, got {s_max}")
    s = np.asarray(spacings, dtype=np.float64)
    edges = np.linspace(0.0, float(s_max), int(n_bins) + 1)
    width = float(s_max) / int(n_bins)
    counts, _ = np.histogram(s, bins=edges)
    total = int(counts.sum())
    if total == 0:
        raise UsageError("no spacings fall inside [0, s_max]")
    density = counts / (total * width)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return SpacingHistogram(
        centers=centers,
        density=density,
        poisson_ref=poisson_density(centers),
        gue_ref=gue_surmise(centers),
        bin_width=width,
    )


def l1_to_poisson(hist: SpacingHistogram) -> float:
    """L1 distance between the histogram density and the Poisson curve."""
    return float(np.sum(np.abs(hist.density - hist.poisson_ref)) * hist.bin_width)


def l1_to_gue(hist: SpacingHistogram) -> float:
    """L1 distance between the histogram density and the GUE surmise."""
    return float(np.sum(np.abs(hist.density - hist.gue_ref)) * hist.bin_width)


def spectrum_stats(
    spectrum: QuasiEnergySpectrum, n_bins: int = 30, s_max: float = 4.0
) -> SpectrumStats:
    """Spacings, ratio statistic, and histogram for one spectrum."""
    s = level_spacings(spectrum)
    return SpectrumStats(
        spacings=s,
        r_mean=r_statistic(s),
        histogram=spacing_histogram(s, n_bins=n_bins, s_max=s_max),
    )


def gue_r_reference(dim: int = 200, n_matrices: int = 200, seed: int = 12345) -> float:
    """Monte-Carlo reference for the ratio statistic of GUE eigenvalues.

    Draws Hermitized complex Gaussian matrices, takes consecutive spacings
    of the sorted eigenvalues (no unfolding; the ratio statistic does not
    need it), and averages the per-matrix ratio means. Deterministic per
    seed.
    """
    if dim < 3 or n_matrices < 1:
        raise UsageError("need dim >= 3 and n_matrices >= 1")
    rng = np.random.default_rng(seed)
    means = np.empty(n_matrices, dtype=np.float64)
    for i in range(n_matrices):
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        evals = np.linalg.eigvalsh((a + a.conj().T) / 2)
        means[i] = r_statistic(np.diff(evals))
    return float(means.mean())


def write_histogram_csv(hist: SpacingHistogram, path) -> None:
    """Write the histogram as "s,density,poisson_ref,gue_ref" rows."""
    from .ioutil import fmt, write_csv

    rows = [
        (fmt(c), fmt(d), fmt(p), fmt(g))
        for c, d, p, g in zip(hist.centers, hist.density, hist.poisson_ref, hist.gue_ref)
    ]
    write_csv(path, ("s", "density", "poisson_ref", "gue_ref"), rows)
