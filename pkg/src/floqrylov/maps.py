"""Floquet unitaries of kicked quantum maps on the torus.

Builds the one-period evolution matrix of two finite-dimensional quantum
maps (a kicked rotor with both position and momentum periodic, and a
kicked Harper model), extracts quasi-energy spectra, and round-trips
matrices through a JSON file format.

Conventions: an eigenvalue of the evolution matrix U is written
lambda_a = exp(-i eps_a) with the quasi-energy eps_a folded to (-pi, pi].
The position grid is q_n = (n + alpha)/N and the momentum grid is
p_m = (m + beta)/N; nonzero alpha breaks parity and nonzero beta breaks
time-reversal symmetry.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParseError, UsageError, ValidationError
from .ioutil import fmt

UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class FloquetParams:
    """Parameters of a kicked map on an N-dimensional torus Hilbert space.

    kappa is the kick strength; alpha and beta are the position and
    momentum grid offsets, reduced modulo 1 at construction.
    """

    n_dim: int
    kappa: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        n = self.n_dim
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
            raise UsageError(f"n_dim must be a positive integer, got {n!r}")
        kappa = float(self.kappa)
        if not math.isfinite(kappa) or kappa < 0:
            raise UsageError(f"kappa must be finite and >= 0, got {self.kappa!r}")
        alpha, beta = float(self.alpha), float(self.beta)
        if not (math.isfinite(alpha) and math.isfinite(beta)):
            raise UsageError("alpha and beta must be finite reals")
        object.__setattr__(self, "n_dim", int(n))
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "alpha", alpha % 1.0)
        object.__setattr__(self, "beta", beta % 1.0)


def unitarity_defect(matrix: np.ndarray) -> float:
    """Max-entry deviation of U^dag U from the identity."""
    m = np.asarray(matrix)
    eye = np.eye(m.shape[0], dtype=np.complex128)
    return float(np.max(np.abs(m.conj().T @ m - eye)))


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Dense complex matrix certified unitary at construction."""

    entries: np.ndarray

    def __post_init__(self):
        try:
            m = np.ascontiguousarray(np.asarray(self.entries, dtype=np.complex128))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"cannot interpret entries as a complex matrix: {exc}")
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValidationError(f"expected a square matrix, got shape {m.shape}")
        if not np.isfinite(m).all():
            raise ValidationError("matrix entries must be finite")
        defect = unitarity_defect(m)
        if not defect < UNITARITY_TOL:
            raise ValidationError(
                f"matrix is not unitary: defect {defect:.3e} exceeds {UNITARITY_TOL:.0e}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n_dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class QuasiEnergySpectrum:
    """Sorted quasi-energies eps_a in (-pi, pi] of a Floquet unitary."""

    phases: np.ndarray
    source_params: FloquetParams | None = None

    def __post_init__(self):
        p = np.ascontiguousarray(np.asarray(self.phases, dtype=np.float64))
        p.setflags(write=False)
        object.__setattr__(self, "phases", p)

    @property
    def n_dim(self) -> int:
        return self.phases.shape[0]


def dft_matrix(n_dim: int) -> np.ndarray:
    """Unitary DFT with F[n, m] = exp(2 pi i n m / N) / sqrt(N)."""
    idx = np.arange(n_dim)
    return np.exp(2j * np.pi * np.outer(idx, idx) / n_dim) / np.sqrt(n_dim)


def build_toral_qkr(params: FloquetParams) -> UnitaryMatrix:
    """One-period unitary of the kicked rotor on the torus.

    Entry (n, n') is the kick phase exp(i N kappa cos(2 pi (n+alpha)/N) / 2pi)
    times the free-evolution kernel
    (1/N) sum_m exp(-i pi (m+beta)^2 / N) exp(2 pi i (m+beta)(n-n') / N).
    The kernel depends on n - n' only, so the m-sum is evaluated once per
    offset; this is the same double sum, deduplicated.
    """
    n, kappa = params.n_dim, params.kappa
    alpha, beta = params.alpha, params.beta
    idx = np.arange(n)
    kick = np.exp(1j * n * kappa / (2 * np.pi) * np.cos(2 * np.pi * (idx + alpha) / n))
    mb = idx + beta
    weights = np.exp(-1j * np.pi * mb**2 / n)
    offsets = np.arange(-(n - 1), n)
    gsum = np.exp(2j * np.pi * np.outer(offsets, mb) / n) @ weights
    free = gsum[(idx[:, None] - idx[None, :]) + (n - 1)]
    return UnitaryMatrix(kick[:, None] * free / n)


def build_kicked_harper(n_dim: int, kappa: float) -> UnitaryMatrix:
    """One-period unitary of the kicked Harper model.

    Product of the position-diagonal kick exp(-i (kappa/2pi) cos(2 pi q_n))
    and the momentum-diagonal factor exp(-i cos(2 pi p_m)) conjugated into
    the position basis by the DFT, with q_n = n/N and p_m = m/N.
    """
    if not isinstance(n_dim, (int, np.integer)) or isinstance(n_dim, bool) or n_dim < 1:
        raise UsageError(f"n_dim must be a positive integer, got {n_dim!r}")
    kappa = float(kappa)
    if not math.isfinite(kappa):
        raise UsageError("kappa must be a finite real")
    n = int(n_dim)
    grid = np.arange(n) / n
    kick = np.exp(-1j * kappa / (2 * np.pi) * np.cos(2 * np.pi * grid))
    f = dft_matrix(n)
    free_mom = np.exp(-1j * np.cos(2 * np.pi * grid))
    free = (f * free_mom) @ f.conj().T
    return UnitaryMatrix(kick[:, None] * free)


def fold_phases(phases: np.ndarray) -> np.ndarray:
    """Fold angles into the principal interval (-pi, pi]."""
    p = np.mod(np.asarray(phases, dtype=np.float64) + np.pi, 2 * np.pi) - np.pi
    return np.where(p <= -np.pi, p + 2 * np.pi, p)


def quasi_energies(
    u: UnitaryMatrix, source_params: FloquetParams | None = None
) -> QuasiEnergySpectrum:
    """Quasi-energies of u, i.e. eps_a = -arg(lambda_a) sorted ascending."""
    try:
        eigvals = np.linalg.eigvals(u.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}")
    phases = fold_phases(-np.angle(eigvals))
    phases.sort()
    return QuasiEnergySpectrum(phases=phases, source_params=source_params)


def save_unitary(u: UnitaryMatrix, path) -> None:
    """Write a matrix as {"n": N, "re": [[...]], "im": [[...]]} JSON.

    Floats carry 17 significant digits so a load reproduces the matrix
    exactly; output bytes are deterministic.
    """
    m = u.entries

    def block(part: np.ndarray) -> str:
        rows = ("[" + ", ".join(fmt(v) for v in row) + "]" for row in part)
        return "[" + ",\n  ".join(rows) + "]"

    text = '{"n": %d,\n "re": %s,\n "im": %s}\n' % (u.n_dim, block(m.real), block(m.imag))
    with open(path, "w") as fh:
        fh.write(text)


def _matrix_part(doc: dict, key: str, n: int) -> np.ndarray:
    rows = doc[key]
    if not isinstance(rows, list) or len(rows) != n:
        raise ParseError(f'"{key}" must be a list of {n} rows')
    out = np.empty((n, n), dtype=np.float64)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f'"{key}" row {i} must have exactly {n} entries')
        for j, val in enumerate(row):
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise ParseError(f'"{key}"[{i}][{j}] is not a number')
            if not math.isfinite(val):
                raise ParseError(f'"{key}"[{i}][{j}] is not finite')
            out[i, j] = float(val)
    return out


def load_unitary(path) -> UnitaryMatrix:
    """Load a matrix saved by save_unitary, certifying unitarity.

    Raises ParseError for malformed files and ValidationError (with the
    defect magnitude) when the matrix is not unitary to 1e-10.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read matrix file {path}: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}")
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    for key in ("n", "re", "im"):
        if key not in doc:
            raise ParseError(f'missing required field "{key}"')
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f'"n" must be a positive integer, got {n!r}')
    re = _matrix_part(doc, "re", n)
    im = _matrix_part(doc, "im", n)
    return UnitaryMatrix(re + 1j * im)
