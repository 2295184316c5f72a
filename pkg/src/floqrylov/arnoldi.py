"""Arnoldi iteration with full re-orthogonalization.

Builds an orthonormal Krylov basis K_0 = v0, K_1, ... for the sequence
{L^j v0} together with the upper-Hessenberg coefficient matrix
h[j, k] = (K_j | L K_k). Each candidate vector is orthogonalized against
the whole current basis with two classical Gram-Schmidt sweeps; the second
sweep mops up the roundoff the first one leaves behind, which is what keeps
the basis orthonormal to ~1e-14 even at dimensions near the theoretical
maximum. The iteration stops when the candidate norm after
orthogonalization drops below tol (the Krylov space closed) or when
max_dim vectors have been produced.

Entries of h on and above the diagonal are recomputed as projections
(K_j | L K_k) once the basis is final; the subdiagonal carries the
candidate norms, which are real and positive by construction. Entries
below the subdiagonal are stored as exact zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalDegeneracyError, UsageError
from .liouville import KrylovVector, Liouvillian, apply_flat, inner_weight

DEFAULT_TOL = 1e-10
NORMALIZATION_TOL = 1e-10
ORTHOGONALITY_LOSS_TOL = 1e-8


@dataclass(eq=False)
class KrylovBasis:
    """Orthonormal Krylov basis and its Hessenberg coefficient matrix.

    stack holds the flattened basis vectors as rows (dk, N) for states or
    (dk, N*N) for operators; hessenberg is the dk x dk coefficient matrix;
    terminated records whether the iteration found a null candidate (the
    Krylov space closed) rather than hitting max_dim.
    """

    kind: str
    n_dim: int
    stack: np.ndarray
    hessenberg: np.ndarray
    dk: int
    terminated: bool

    @property
    def vectors(self) -> list[KrylovVector]:
        if self.kind == "operator":
            n = self.n_dim
            return [KrylovVector(row.reshape(n, n)) for row in self.stack]
        return [KrylovVector(row) for row in self.stack]


def max_krylov_dim(kind: str, n_dim: int) -> int:
    """Theoretical cap on the Krylov dimension: N for states, N^2-N+1 for operators."""
    if kind == "state":
        return n_dim
    if kind == "operator":
        return n_dim * n_dim - n_dim + 1
    raise UsageError(f"unknown space kind {kind!r}")


def _check_start(liou: Liouvillian, v0: KrylovVector, tol: float) -> None:
    if not isinstance(tol, float) and not isinstance(tol, int):
        raise UsageError("tol must be a positive real")
    if not (tol > 0 and math.isfinite(tol)):
        raise UsageError(f"tol must be positive and finite, got {tol}")
    if liou.acts_on != v0.kind or liou.n_dim != v0.n_dim:
        raise UsageError(
            f"{liou.kind}(N={liou.n_dim}) does not act on {v0.kind}(N={v0.n_dim})"
        )


def arnoldi_iterate(
    liou: Liouvillian,
    v0: KrylovVector,
    max_dim: int,
    tol: float = DEFAULT_TOL,
) -> KrylovBasis:
    """Run the Arnoldi iteration from a normalized start vector.

    Args:
        liou: evolution generator (any variant).
        v0: normalized start vector in the matching space.
        max_dim: stop after this many basis vectors if the space has not
            closed; must be >= 1.
        tol: candidate-norm threshold that declares the Krylov space closed.

    Returns:
        KrylovBasis with dk <= max_dim vectors.

    Raises:
        UsageError: incompatible arguments or non-normalized v0.
        NumericalDegeneracyError: orthogonality loss beyond 1e-8 at some
            step even after re-orthogonalization.
    """
    if max_dim < 1:
        raise UsageError(f"max_dim must be >= 1, got {max_dim}")
    _check_start(liou, v0, tol)
    weight = inner_weight(v0.kind, v0.n_dim)
    sqw = math.sqrt(weight)
    flat0 = v0.data.ravel()
    if abs(sqw * np.linalg.norm(flat0) - 1.0) > NORMALIZATION_TOL:
        raise UsageError("v0 must be normalized to unit norm")

    m = flat0.size
    cap = min(int(max_dim), m)
    basis = np.empty((cap, m), dtype=np.complex128)
    basis_c = np.empty((cap, m), dtype=np.complex128)  # conjugated copy for BLAS
    applied = np.empty((cap, m), dtype=np.complex128)
    basis[0] = flat0
    basis_c[0] = flat0.conj()
    subnorms: list[float] = []
    dk = 1
    terminated = False

    while dk < cap:
        w = apply_flat(liou, basis[dk - 1])
        applied[dk - 1] = w
        for _ in range(2):
            coeffs = basis_c[:dk] @ w * weight
            w = w - coeffs @ basis[:dk]
        nrm = sqw * float(np.linalg.norm(w))
        if nrm < tol:
            terminated = True
            break
        residual = weight * float(np.max(np.abs(basis_c[:dk] @ w)))
        if residual > ORTHOGONALITY_LOSS_TOL * nrm:
            raise NumericalDegeneracyError(
                f"orthogonality loss {residual / nrm:.3e} at step {dk}", step=dk
            )
        basis[dk] = w / nrm
        basis_c[dk] = basis[dk].conj()
        subnorms.append(nrm)
        dk += 1

    if not terminated:
        applied[dk - 1] = apply_flat(liou, basis[dk - 1])

    hess = weight * (basis_c[:dk] @ applied[:dk].T)
    if dk > 2:
        hess[np.tril_indices(dk, k=-2)] = 0.0
    if dk > 1:
        hess[np.arange(1, dk), np.arange(dk - 1)] = subnorms
    return KrylovBasis(
        kind=v0.kind,
        n_dim=v0.n_dim,
        stack=basis[:dk].copy(),
        hessenberg=hess,
        dk=dk,
        terminated=terminated,
    )


def krylov_dimension(liou: Liouvillian, v0: KrylovVector, tol: float = DEFAULT_TOL) -> int:
    """Krylov dimension D_K of (liou, v0).

    Runs the iteration up to the theoretical cap; returns the step count of
    a terminated run, or the cap itself when the iteration exhausts it
    without finding a null candidate.
    """
    cap = max_krylov_dim(v0.kind, v0.n_dim)
    return arnoldi_iterate(liou, v0, cap, tol).dk


def subdiagonal(basis: KrylovBasis) -> np.ndarray:
    """The real positive coefficients h[n, n-1], length dk - 1."""
    return np.diag(basis.hessenberg, k=-1).real.copy()


def write_hessenberg_csv(basis: KrylovBasis, path) -> None:
    """Write the stored Hessenberg entries (j <= k+1) as "j,k,re,im" rows."""
    from .ioutil import fmt, write_csv

    h = basis.hessenberg
    dk = basis.dk
    rows = []
    for j in range(dk):
        for k in range(max(0, j - 1), dk):
            rows.append((str(j), str(k), fmt(h[j, k].real), fmt(h[j, k].imag)))
    write_csv(path, ("j", "k", "re", "im"), rows)


def write_subdiagonal_csv(basis: KrylovBasis, path) -> None:
    """Write h[n, n-1] as "n,h" rows, n = 1 .. dk-1."""
    from .ioutil import fmt, write_csv

    sub = subdiagonal(basis)
    rows = [(str(n + 1), fmt(val)) for n, val in enumerate(sub)]
    write_csv(path, ("n", "h"), rows)


def dump_basis_vectors(basis: KrylovBasis, out_dir, prefix: str = "basis") -> list[str]:
    """Write each basis vector as a JSON file in the matrix format.

    State vectors are stored as a single-row matrix. Returns the paths.
    """
    import os

    from .ioutil import fmt

    paths = []
    for i, row in enumerate(basis.stack):
        if basis.kind == "operator":
            mat = row.reshape(basis.n_dim, basis.n_dim)
        else:
            mat = row.reshape(1, basis.n_dim)

        def block(part):
            rows = ("[" + ", ".join(fmt(v) for v in r) + "]" for r in part)
            return "[" + ",\n  ".join(rows) + "]"

        path = os.path.join(out_dir, f"{prefix}_{i:04d}.json")
        with open(path, "w") as fh:
            fh.write(
                '{"n": %d,\n "re": %s,\n "im": %s}\n'
                % (basis.n_dim, block(mat.real), block(mat.imag))
            )
        paths.append(path)
    return paths
