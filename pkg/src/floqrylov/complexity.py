"""Krylov-space amplitudes, complexity, and entropy.

The amplitude phi_n^j = (K_n | L^j v0) measures how far the evolved vector
has spread along the Krylov chain after j periods. Three routes compute
the same table:

  direct        evolve v0 step by step and project onto the basis
  recursive     iterate the Hessenberg recursion phi^{j+1} = h phi^j
  hermitian_ode continuous evolution under the tridiagonal (a, b)
                generator, evaluated by exact eigendecomposition

The first two must agree to high accuracy for the same run; that cross
check is deliberate and lives in the test suite. From the amplitudes,
K-complexity K_j = sum_n n |phi_n^j|^2 and K-entropy
S_j = -sum_n |phi_n^j|^2 ln |phi_n^j|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .liouville import KrylovVector, Liouvillian, apply_flat, inner_weight
from .arnoldi import KrylovBasis
from .lanczos import LanczosData

ROUTES = ("direct", "recursive", "hermitian_ode")


@dataclass(eq=False)
class AmplitudeSeries:
    """Amplitude table with shape (steps + 1, dk); row j is phi^j."""

    amps: np.ndarray
    route: str

    @property
    def steps(self) -> int:
        return self.amps.shape[0] - 1

    @property
    def dk(self) -> int:
        return self.amps.shape[1]


@dataclass(eq=False)
class ComplexityTrace:
    """K-complexity and K-entropy per step with late-time saturation stats."""

    k_values: np.ndarray
    s_values: np.ndarray
    saturation_mean: float
    saturation_std: float


def amplitudes_direct(
    basis: KrylovBasis, liou: Liouvillian, v0: KrylovVector, steps: int
) -> AmplitudeSeries:
    """Amplitudes by repeated application of the generator and projection.

    v0 must be the vector the basis was built from (it is checked against
    the first basis vector); steps is the number of periods to evolve.
    """
    if steps < 0:
        raise UsageError(f"steps must be >= 0, got {steps}")
    if liou.acts_on != basis.kind or liou.n_dim != basis.n_dim:
        raise UsageError("Liouvillian does not match the basis space")
    if v0.kind != basis.kind or v0.n_dim != basis.n_dim:
        raise UsageError("v0 does not match the basis space")
    weight = inner_weight(basis.kind, basis.n_dim)
    flat0 = v0.data.ravel()
    overlap = weight * complex(np.vdot(basis.stack[0], flat0))
    if abs(overlap - 1.0) > 1e-8:
        raise UsageError("v0 is not the start vector of this basis")

    stack_c = basis.stack.conj()
    amps = np.zeros((steps + 1, basis.dk), dtype=np.complex128)
    amps[0, 0] = 1.0
    vec = flat0
    for j in range(1, steps + 1):
        vec = apply_flat(liou, vec)
        amps[j] = weight * (stack_c @ vec)
    return AmplitudeSeries(amps=amps, route="direct")


def amplitudes_recursive(hessenberg: np.ndarray, dk: int, steps: int) -> AmplitudeSeries:
    """Amplitudes from the Hessenberg recursion phi^{j+1} = h phi^j.

    Requires exact zeros below the first subdiagonal, as arnoldi_iterate
    stores them.
    """
    if steps < 0:
        raise UsageError(f"steps must be >= 0, got {steps}")
    h = np.asarray(hessenberg, dtype=np.complex128)
    if h.ndim != 2 or h.shape != (dk, dk):
        raise UsageError(f"hessenberg must be a {dk} x {dk} matrix, got {h.shape}")
    if dk > 2 and np.any(h[np.tril_indices(dk, k=-2)] != 0):
        raise UsageError("matrix is not upper Hessenberg")

    amps = np.zeros((steps + 1, dk), dtype=np.complex128)
    amps[0, 0] = 1.0
    for j in range(steps):
        amps[j + 1] = h @ amps[j]
    return AmplitudeSeries(amps=amps, route="recursive")


def evolve_hermitian_amplitudes(data: LanczosData, times: np.ndarray) -> AmplitudeSeries:
    """Amplitudes of continuous evolution along the tridiagonal chain.

    Solves d/dt phi_n = i a_n phi_n + b_n phi_{n-1} - b_{n+1} phi_{n+1}
    from phi_n(0) = delta_{n0}, by eigendecomposition of the Hermitian
    tridiagonal generator (no step-wise integration). times must be sorted
    ascending with times[0] >= 0.
    """
    t = np.asarray(times, dtype=np.float64)
    if t.ndim != 1 or t.size < 1:
        raise UsageError("times must be a non-empty 1-D array")
    if not np.isfinite(t).all():
        raise UsageError("times must be finite")
    if np.any(np.diff(t) < 0) or t[0] < 0:
        raise UsageError("times must be sorted ascending with times[0] >= 0")

    dk = data.dk
    gen = np.diag(data.a.astype(np.complex128))
    if dk > 1:
        gen += np.diag(-1j * data.b, k=-1) + np.diag(1j * data.b, k=1)
    evals, vecs = np.linalg.eigh(gen)
    start = vecs[0, :].conj()  # coefficients of delta_{n0} in the eigenbasis
    phases = np.exp(1j * np.outer(t, evals))
    amps = (phases * start) @ vecs.T
    amps[t == 0.0] = 0.0
    amps[t == 0.0, 0] = 1.0
    return AmplitudeSeries(amps=amps, route="hermitian_ode")


def k_complexity(series: AmplitudeSeries) -> np.ndarray:
    """K_j = sum_n n |phi_n^j|^2, one value per row."""
    weights = np.arange(series.dk, dtype=np.float64)
    return (np.abs(series.amps) ** 2) @ weights


def k_entropy(series: AmplitudeSeries) -> np.ndarray:
    """S_j = -sum_n |phi_n^j|^2 ln |phi_n^j|^2 with 0 ln 0 = 0."""
    p = np.abs(series.amps) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log(p), 0.0)
    return -terms.sum(axis=1)


def saturation_stats(values: np.ndarray, window_fraction: float = 0.25) -> tuple[float, float]:
    """Mean and population std over the trailing window of a series.

    The window covers the last ceil(window_fraction * len) entries.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim != 1 or vals.size == 0:
        raise UsageError("values must be a non-empty 1-D array")
    if not (0 < window_fraction <= 1):
        raise UsageError(f"window_fraction must be in (0, 1], got {window_fraction}")
    w = math.ceil(window_fraction * vals.size)
    tail = vals[-w:]
    return float(tail.mean()), float(tail.std())


def complexity_trace(series: AmplitudeSeries, window_fraction: float = 0.25) -> ComplexityTrace:
    """Bundle K-complexity and K-entropy with saturation stats of K."""
    k_vals = k_complexity(series)
    s_vals = k_entropy(series)
    mean, std = saturation_stats(k_vals, window_fraction)
    return ComplexityTrace(
        k_values=k_vals, s_values=s_vals, saturation_mean=mean, saturation_std=std
    )


def write_complexity_csv(trace: ComplexityTrace, path) -> None:
    """Write per-step complexity as "j,k_complexity,k_entropy" rows."""
    from .ioutil import fmt, write_csv

    rows = [
        (str(j), fmt(k), fmt(s))
        for j, (k, s) in enumerate(zip(trace.k_values, trace.s_values))
    ]
    write_csv(path, ("j", "k_complexity", "k_entropy"), rows)


def write_amplitudes_csv(series: AmplitudeSeries, path) -> None:
    """Write the full amplitude table as "j,n,re,im" rows (can be large)."""
    from .ioutil import fmt, write_csv

    rows = []
    for j in range(series.amps.shape[0]):
        row = series.amps[j]
        for n in range(series.dk):
            rows.append((str(j), str(n), fmt(row[n].real), fmt(row[n].imag)))
    write_csv(path, ("j", "n", "re", "im"), rows)
