"""Lanczos iteration for Hermitian generators and the effective Hamiltonian.

For a Hermitian variant the Arnoldi Hessenberg matrix degenerates to a real
tridiagonal one, so the three-term recursion suffices: diagonal
coefficients a_n = <K_n|L K_n> and positive couplings b_n = h[n, n-1].
Full re-orthogonalization against the whole basis is kept, exactly as in
the Arnoldi engine, because the plain recursion loses orthogonality
long before the space closes.

effective_hamiltonian() maps a Floquet unitary to the Hermitian generator
with the same eigenbasis and principal-branch eigenphases in (-pi, pi],
i.e. H = i log U without any phase unwinding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalDegeneracyError, NumericalError, UsageError
from .liouville import KrylovVector, Liouvillian, apply_flat, inner_weight
from .maps import UnitaryMatrix, fold_phases
from .arnoldi import DEFAULT_TOL, NORMALIZATION_TOL, ORTHOGONALITY_LOSS_TOL

REALITY_TOL = 1e-10


@dataclass(eq=False)
class LanczosData:
    """Tridiagonal coefficients and basis from a Hermitian-variant run.

    a has length dk, b has length dk - 1 with every entry positive; stack
    holds the flattened orthonormal basis vectors as rows.
    """

    kind: str
    n_dim: int
    a: np.ndarray
    b: np.ndarray
    stack: np.ndarray
    dk: int

    @property
    def vectors(self) -> list[KrylovVector]:
        if self.kind == "operator":
            n = self.n_dim
            return [KrylovVector(row.reshape(n, n)) for row in self.stack]
        return [KrylovVector(row) for row in self.stack]


def lanczos_iterate(
    liou: Liouvillian,
    v0: KrylovVector,
    max_dim: int,
    tol: float = DEFAULT_TOL,
) -> LanczosData:
    """Run the Lanczos iteration from a normalized start vector.

    Raises UsageError when liou is not a Hermitian variant; termination
    semantics match arnoldi_iterate (candidate norm below tol, or max_dim
    vectors reached).
    """
    if not liou.is_hermitian:
        raise UsageError("lanczos_iterate requires a Hermitian-variant Liouvillian")
    if max_dim < 1:
        raise UsageError(f"max_dim must be >= 1, got {max_dim}")
    if not (tol > 0 and math.isfinite(tol)):
        raise UsageError(f"tol must be positive and finite, got {tol}")
    if liou.acts_on != v0.kind or liou.n_dim != v0.n_dim:
        raise UsageError(
            f"{liou.kind}(N={liou.n_dim}) does not act on {v0.kind}(N={v0.n_dim})"
        )
    weight = inner_weight(v0.kind, v0.n_dim)
    sqw = math.sqrt(weight)
    flat0 = v0.data.ravel()
    if abs(sqw * np.linalg.norm(flat0) - 1.0) > NORMALIZATION_TOL:
        raise UsageError("v0 must be normalized to unit norm")

    m = flat0.size
    cap = min(int(max_dim), m)
    basis = np.empty((cap, m), dtype=np.complex128)
    basis_c = np.empty((cap, m), dtype=np.complex128)
    basis[0] = flat0
    basis_c[0] = flat0.conj()
    a_list: list[float] = []
    b_list: list[float] = []
    dk = 1

    while True:
        w = apply_flat(liou, basis[dk - 1])
        a_val = weight * complex(np.vdot(basis[dk - 1], w))
        if abs(a_val.imag) > REALITY_TOL:
            raise NumericalDegeneracyError(
                f"diagonal coefficient has imaginary part {a_val.imag:.3e} at step {dk - 1}",
                step=dk - 1,
            )
        a_list.append(a_val.real)
        if dk == cap:
            break
        for _ in range(2):
            coeffs = basis_c[:dk] @ w * weight
            w = w - coeffs @ basis[:dk]
        nrm = sqw * float(np.linalg.norm(w))
        if nrm < tol:
            break
        residual = weight * float(np.max(np.abs(basis_c[:dk] @ w)))
        if residual > ORTHOGONALITY_LOSS_TOL * nrm:
            raise NumericalDegeneracyError(
                f"orthogonality loss {residual / nrm:.3e} at step {dk}", step=dk
            )
        basis[dk] = w / nrm
        basis_c[dk] = basis[dk].conj()
        b_list.append(nrm)
        dk += 1

    return LanczosData(
        kind=v0.kind,
        n_dim=v0.n_dim,
        a=np.array(a_list, dtype=np.float64),
        b=np.array(b_list, dtype=np.float64),
        stack=basis[:dk].copy(),
        dk=dk,
    )


def effective_hamiltonian(u: UnitaryMatrix) -> np.ndarray:
    """Hermitian matrix H with exp(-i H) = U and eigenvalues in (-pi, pi].

    Computed from the complex Schur form of U, which supplies an exactly
    orthonormal eigenbasis even for (nearly) degenerate eigenvalues; the
    eigenphases are folded to the principal interval, never unwound.
    """
    try:
        t, z = scipy.linalg.schur(np.asarray(u.entries), output="complex")
    except (ValueError, scipy.linalg.LinAlgError) as exc:
        raise NumericalError(f"Schur decomposition failed: {exc}")
    eps = fold_phases(-np.angle(np.diag(t)))
    h = (z * eps) @ z.conj().T
    return 0.5 * (h + h.conj().T)


def write_lanczos_csv(data: LanczosData, path) -> None:
    """Write tridiagonal coefficients as "n,a,b" rows; b is empty on the last row."""
    from .ioutil import fmt, write_csv

    rows = []
    for n in range(data.dk):
        b_str = fmt(data.b[n]) if n < data.dk - 1 else ""
        rows.append((str(n), fmt(data.a[n]), b_str))
    write_csv(path, ("n", "a", "b"), rows)
