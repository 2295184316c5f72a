"""State and operator spaces underlying the Krylov construction.

Krylov vectors live either in the N-dimensional state space with the usual
Hermitian inner product or in the space of N x N operators with the
normalized trace product (A|B) = Tr(A^dag B) / N. Evolution generators
("Liouvillians") are tagged variants so the iteration engines stay
space-agnostic:

  unitary_state         v -> U v
  unitary_conjugation   O -> U^dag O U     (one period, Heisenberg picture)
  hermitian_state       v -> H v
  hermitian_commutator  O -> [H, O]

Superoperators are never materialized as N^2 x N^2 matrices; applying one
costs two N x N matrix multiplications.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UsageError, ValidationError
from .maps import UnitaryMatrix, dft_matrix

HERMITICITY_TOL = 1e-10

VARIANTS = (
    "unitary_state",
    "unitary_conjugation",
    "hermitian_state",
    "hermitian_commutator",
)


@dataclass(frozen=True, eq=False)
class KrylovVector:
    """Element of the state space (1-D data) or operator space (2-D data)."""

    data: np.ndarray

    def __post_init__(self):
        try:
            arr = np.ascontiguousarray(np.asarray(self.data, dtype=np.complex128))
        except (TypeError, ValueError) as exc:
            raise UsageError(f"cannot interpret data as a complex array: {exc}")
        if arr.ndim not in (1, 2):
            raise UsageError(f"expected a vector or square matrix, got ndim={arr.ndim}")
        if arr.ndim == 2 and arr.shape[0] != arr.shape[1]:
            raise UsageError(f"operator data must be square, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise UsageError("empty vector")
        if not np.isfinite(arr).all():
            raise UsageError("vector entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def kind(self) -> str:
        return "operator" if self.data.ndim == 2 else "state"

    @property
    def n_dim(self) -> int:
        return self.data.shape[0]


def state_vector(data) -> KrylovVector:
    v = KrylovVector(data)
    if v.kind != "state":
        raise UsageError("state_vector expects 1-D data")
    return v


def operator_vector(data) -> KrylovVector:
    v = KrylovVector(data)
    if v.kind != "operator":
        raise UsageError("operator_vector expects square 2-D data")
    return v


def inner_weight(kind: str, n_dim: int) -> float:
    """Weight of the flattened inner product: 1 for states, 1/N for operators."""
    return 1.0 / n_dim if kind == "operator" else 1.0


def inner(a: KrylovVector, b: KrylovVector) -> complex:
    """<a|b> for states, Tr(a^dag b)/N for operators."""
    if a.kind != b.kind or a.n_dim != b.n_dim:
        raise UsageError(
            f"inner product between {a.kind}(N={a.n_dim}) and {b.kind}(N={b.n_dim})"
        )
    return complex(np.vdot(a.data, b.data) * inner_weight(a.kind, a.n_dim))


def norm(v: KrylovVector) -> float:
    return float(np.linalg.norm(v.data) * math.sqrt(inner_weight(v.kind, v.n_dim)))


def normalized(v: KrylovVector) -> KrylovVector:
    n = norm(v)
    if n == 0.0:
        raise UsageError("cannot normalize a zero vector")
    return KrylovVector(v.data / n)


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Tagged evolution generator; build via the constructor functions."""

    kind: str
    matrix: np.ndarray

    @property
    def n_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def acts_on(self) -> str:
        return "state" if self.kind.endswith("_state") else "operator"

    @property
    def is_hermitian(self) -> bool:
        return self.kind.startswith("hermitian")

    @property
    def is_unitary(self) -> bool:
        return self.kind.startswith("unitary")


def _as_unitary_entries(u) -> np.ndarray:
    if isinstance(u, UnitaryMatrix):
        return u.entries
    return UnitaryMatrix(u).entries


def _as_hermitian(h) -> np.ndarray:
    try:
        m = np.ascontiguousarray(np.asarray(h, dtype=np.complex128))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"cannot interpret matrix: {exc}")
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValidationError("matrix entries must be finite")
    defect = float(np.max(np.abs(m - m.conj().T)))
    if not defect < HERMITICITY_TOL:
        raise ValidationError(
            f"matrix is not Hermitian: defect {defect:.3e} exceeds {HERMITICITY_TOL:.0e}"
        )
    m.setflags(write=False)
    return m


def unitary_on_state(u) -> Liouvillian:
    """v -> U v."""
    return Liouvillian("unitary_state", _as_unitary_entries(u))


def unitary_conjugation(u) -> Liouvillian:
    """O -> U^dag O U, the one-period Heisenberg map on operators."""
    return Liouvillian("unitary_conjugation", _as_unitary_entries(u))


def hermitian_on_state(h) -> Liouvillian:
    """v -> H v."""
    return Liouvillian("hermitian_state", _as_hermitian(h))


def hermitian_commutator(h) -> Liouvillian:
    """O -> [H, O]; Hermitian as a superoperator under the trace product."""
    return Liouvillian("hermitian_commutator", _as_hermitian(h))


def _apply_array(liou: Liouvillian, arr: np.ndarray) -> np.ndarray:
    m = liou.matrix
    if liou.kind == "unitary_state" or liou.kind == "hermitian_state":
        return m @ arr
    if liou.kind == "unitary_conjugation":
        return m.conj().T @ arr @ m
    return m @ arr - arr @ m


def apply(liou: Liouvillian, v: KrylovVector) -> KrylovVector:
    """Apply the generator once; two N x N matmuls in the operator case."""
    if liou.acts_on != v.kind or liou.n_dim != v.n_dim:
        raise UsageError(
            f"{liou.kind}(N={liou.n_dim}) cannot act on {v.kind}(N={v.n_dim})"
        )
    return KrylovVector(_apply_array(liou, v.data))


def apply_flat(liou: Liouvillian, flat: np.ndarray) -> np.ndarray:
    """apply() on a flattened array, for the iteration engines."""
    if liou.acts_on == "state":
        return _apply_array(liou, flat)
    n = liou.n_dim
    return _apply_array(liou, flat.reshape(n, n)).ravel()


def _descriptor_args(spec: str) -> tuple[str, list[int]]:
    name, _, tail = spec.partition(":")
    name = name.strip()
    if not tail.strip():
        return name, []
    try:
        args = [int(tok) for tok in tail.split(",")]
    except ValueError:
        raise UsageError(f"non-integer argument in initial-condition descriptor {spec!r}")
    return name, args


def initial_vectors(spec: str, n_dim: int, seed: int = 0) -> KrylovVector:
    """Build a normalized initial state or operator from a descriptor.

    Descriptors (index arguments after a colon):
      position_state:K   momentum_state:K   uniform_state   random_state
      position_operator  momentum_operator  identity_operator
      random_hermitian_operator             basis_operator:A,B

    Random variants draw from numpy's seeded generator and are reproducible
    per seed.
    """
    if n_dim < 1:
        raise UsageError(f"n_dim must be positive, got {n_dim}")
    n = int(n_dim)
    name, args = _descriptor_args(spec)
    expected = {"position_state": 1, "momentum_state": 1, "basis_operator": 2}
    if len(args) != expected.get(name, 0):
        raise UsageError(
            f"descriptor {spec!r} takes {expected.get(name, 0)} index argument(s)"
        )
    for a in args:
        if not 0 <= a < n:
            raise UsageError(f"index {a} out of range for N={n} in {spec!r}")

    rng = np.random.default_rng(seed)
    if name == "position_state":
        vec = np.zeros(n, dtype=np.complex128)
        vec[args[0]] = 1.0
        return KrylovVector(vec)
    if name == "momentum_state":
        idx = np.arange(n)
        return KrylovVector(np.exp(2j * np.pi * idx * args[0] / n) / np.sqrt(n))
    if name == "uniform_state":
        return KrylovVector(np.full(n, 1.0 / np.sqrt(n), dtype=np.complex128))
    if name == "random_state":
        vec = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return normalized(KrylovVector(vec))
    if name == "position_operator":
        return normalized(KrylovVector(np.diag(np.arange(n) / n).astype(np.complex128)))
    if name == "momentum_operator":
        f = dft_matrix(n)
        mat = (f * (np.arange(n) / n)) @ f.conj().T
        return normalized(KrylovVector(mat))
    if name == "identity_operator":
        return KrylovVector(np.eye(n, dtype=np.complex128))
    if name == "random_hermitian_operator":
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return normalized(KrylovVector((a + a.conj().T) / 2))
    if name == "basis_operator":
        mat = np.zeros((n, n), dtype=np.complex128)
        mat[args[0], args[1]] = np.sqrt(n)
        return KrylovVector(mat)
    raise UsageError(f"unknown initial-condition descriptor {spec!r}")
