import numpy as np
import pytest

from floqrylov.arnoldi import (
    arnoldi_iterate,
    dump_basis_vectors,
    krylov_dimension,
    max_krylov_dim,
    subdiagonal,
    write_hessenberg_csv,
    write_subdiagonal_csv,
)
from floqrylov.errors import UsageError
from floqrylov.liouville import (
    apply,
    apply_flat,
    initial_vectors,
    inner,
    inner_weight,
    hermitian_on_state,
    state_vector,
    unitary_conjugation,
    unitary_on_state,
)
from floqrylov.maps import FloquetParams, build_kicked_harper, build_toral_qkr


def naive_arnoldi(liou, v0, max_dim, tol=1e-10):
    """Reference implementation: explicit lists of KrylovVector objects,
    classical Gram-Schmidt repeated twice, coefficients via inner()."""
    vecs = [v0]
    subnorms = []
    terminated = False
    while len(vecs) < max_dim:
        w = apply(liou, vecs[-1])
        data = w.data.copy()
        for _ in range(2):
            for q in vecs:
                c = inner(q, type(q)(data))
                data = data - c * q.data
        nrm = np.sqrt(inner_weight(v0.kind, v0.n_dim)) * np.linalg.norm(data)
        if nrm < tol:
            terminated = True
            break
        vecs.append(type(v0)(data / nrm))
        subnorms.append(float(nrm))
    dk = len(vecs)
    h = np.zeros((dk, dk), dtype=np.complex128)
    for k in range(dk):
        lk = apply(liou, vecs[k])
        for j in range(min(k + 2, dk)):
            h[j, k] = inner(vecs[j], lk)
    for n, b in enumerate(subnorms):
        h[n + 1, n] = b
    return vecs, h, terminated


def qkr_state_case(n=6, kappa=3.0, seed=0):
    u = build_toral_qkr(FloquetParams(n_dim=n, kappa=kappa, alpha=0.2, beta=0.3))
    liou = unitary_on_state(u)
    v0 = initial_vectors("random_state", n, seed=seed)
    return u, liou, v0


def test_max_krylov_dim_values():
    assert max_krylov_dim("state", 350) == 350
    assert max_krylov_dim("operator", 32) == 32 * 32 - 32 + 1
    with pytest.raises(UsageError):
        max_krylov_dim("density", 3)


def test_matches_naive_reference():
    _, liou, v0 = qkr_state_case()
    basis = arnoldi_iterate(liou, v0, 6)
    vecs, h_ref, _ = naive_arnoldi(liou, v0, 6)
    assert basis.dk == len(vecs)
    for j, q in enumerate(vecs):
        assert np.max(np.abs(basis.stack[j] - q.data.ravel())) < 1e-11
    assert np.max(np.abs(basis.hessenberg - h_ref)) < 1e-11


def test_matches_naive_reference_operator_mode():
    u = build_kicked_harper(3, 2.0)
    liou = unitary_conjugation(u)
    v0 = initial_vectors("random_hermitian_operator", 3, seed=4)
    basis = arnoldi_iterate(liou, v0, max_krylov_dim("operator", 3))
    vecs, h_ref, term = naive_arnoldi(liou, v0, max_krylov_dim("operator", 3))
    assert basis.dk == len(vecs)
    assert basis.terminated == term
    assert np.max(np.abs(basis.hessenberg - h_ref)) < 1e-10


def test_eigenvector_start_closes_immediately():
    u, _, _ = qkr_state_case(n=5)
    lam, vecs = np.linalg.eig(u.entries)
    v0 = state_vector(vecs[:, 2] / np.linalg.norm(vecs[:, 2]))
    basis = arnoldi_iterate(unitary_on_state(u), v0, 5)
    assert basis.dk == 1
    assert basis.terminated
    # the 1x1 h is the eigenvalue itself
    assert abs(basis.hessenberg[0, 0] - lam[2]) < 1e-10


def test_identity_operator_is_fixed_point():
    u, *_ = qkr_state_case(n=7)
    v0 = initial_vectors("identity_operator", 7)
    basis = arnoldi_iterate(unitary_conjugation(u), v0, 10)
    assert basis.dk == 1 and basis.terminated
    assert abs(basis.hessenberg[0, 0] - 1.0) < 1e-12


def test_eigenvector_combination_sets_dimension():
    """A start vector supported on k eigdirections closes at dk = k."""
    u, _, _ = qkr_state_case(n=8, kappa=5.0)
    _, vecs = np.linalg.eig(u.entries)
    mix = vecs[:, 1] + vecs[:, 4] + vecs[:, 6]
    v0 = state_vector(mix / np.linalg.norm(mix))
    basis = arnoldi_iterate(unitary_on_state(u), v0, 8)
    assert basis.dk == 3
    assert basis.terminated


def test_terminated_h_is_unitary_on_the_subspace():
    u, _, _ = qkr_state_case(n=8, kappa=5.0)
    _, vecs = np.linalg.eig(u.entries)
    mix = vecs[:, 0] + vecs[:, 3] + vecs[:, 5] + vecs[:, 7]
    v0 = state_vector(mix / np.linalg.norm(mix))
    basis = arnoldi_iterate(unitary_on_state(u), v0, 8)
    assert basis.terminated
    h = basis.hessenberg
    assert np.max(np.abs(h.conj().T @ h - np.eye(basis.dk))) < 1e-10


def test_orthonormality_invariant():
    for seed in range(6):
        n = 4 + seed
        u = build_toral_qkr(FloquetParams(n_dim=n, kappa=1.0 + seed, alpha=0.1, beta=0.4))
        v0 = initial_vectors("random_state", n, seed=seed)
        basis = arnoldi_iterate(unitary_on_state(u), v0, n)
        g = basis.stack.conj() @ basis.stack.T * inner_weight("state", n)
        assert np.max(np.abs(g - np.eye(basis.dk))) < 1e-12


def test_reconstruction_invariant():
    """L K_k must equal sum_j h[j,k] K_j for all completed columns."""
    u = build_toral_qkr(FloquetParams(n_dim=6, kappa=2.0, alpha=0.15, beta=0.25))
    liou = unitary_conjugation(u)
    v0 = initial_vectors("random_hermitian_operator", 6, seed=1)
    basis = arnoldi_iterate(liou, v0, max_krylov_dim("operator", 6))
    w = inner_weight("operator", 6)
    last = basis.dk if basis.terminated else basis.dk - 1
    for k in range(last):
        lk = apply_flat(liou, basis.stack[k])
        rec = basis.hessenberg[:, k] @ basis.stack
        assert np.sqrt(w) * np.linalg.norm(lk - rec) < 1e-11


def test_hessenberg_zero_below_subdiagonal():
    _, liou, v0 = qkr_state_case(n=9)
    basis = arnoldi_iterate(liou, v0, 9)
    h = basis.hessenberg
    for j in range(basis.dk):
        for k in range(j - 1):
            assert h[j, k] == 0.0


def test_subdiagonal_real_positive_and_matches_h():
    _, liou, v0 = qkr_state_case(n=10)
    basis = arnoldi_iterate(liou, v0, 10)
    sub = subdiagonal(basis)
    assert sub.shape == (basis.dk - 1,)
    assert np.all(sub > 0)
    assert np.max(np.abs(np.diag(basis.hessenberg, k=-1) - sub)) < 1e-15


def test_unitary_h_interior_columns_have_unit_norm():
    # norm preservation pushed through the compression
    _, liou, v0 = qkr_state_case(n=12, kappa=8.0)
    basis = arnoldi_iterate(liou, v0, 12)
    col_norms = np.linalg.norm(basis.hessenberg[:, : basis.dk - 1], axis=0)
    assert np.max(np.abs(col_norms - 1.0)) < 1e-11


def test_hermitian_generator_gives_tridiagonal_h():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
    liou = hermitian_on_state((a + a.conj().T) / 2)
    v0 = initial_vectors("random_state", 7, seed=3)
    basis = arnoldi_iterate(liou, v0, 7)
    h = basis.hessenberg
    mask = np.abs(np.arange(basis.dk)[:, None] - np.arange(basis.dk)[None, :]) > 1
    assert np.max(np.abs(h[mask])) < 1e-12
    assert np.max(np.abs(np.diag(h).imag)) < 1e-12


def test_max_dim_truncates_without_termination():
    _, liou, v0 = qkr_state_case(n=10)
    basis = arnoldi_iterate(liou, v0, 4)
    assert basis.dk == 4
    assert not basis.terminated


def test_phase_rotated_start_gives_same_h():
    _, liou, v0 = qkr_state_case(n=8)
    rotated = state_vector(np.exp(0.7j) * v0.data)
    b1 = arnoldi_iterate(liou, v0, 8)
    b2 = arnoldi_iterate(liou, rotated, 8)
    assert b1.dk == b2.dk
    assert np.max(np.abs(b1.hessenberg - b2.hessenberg)) < 1e-11


def test_gram_rank_agreement_small():
    for seed in range(5):
        u = build_toral_qkr(FloquetParams(n_dim=3, kappa=2.0 + seed, alpha=0.3, beta=0.1))
        liou = unitary_conjugation(u)
        v0 = initial_vectors("random_hermitian_operator", 3, seed=seed)
        cap = max_krylov_dim("operator", 3)
        dk = krylov_dimension(liou, v0)
        w = inner_weight("operator", 3)
        seq = [v0.data.ravel().copy()]
        for _ in range(cap):
            seq.append(apply_flat(liou, seq[-1]))
        gram = np.array(seq).conj() @ np.array(seq).T * w
        lam = np.linalg.eigvalsh(gram)
        assert dk == int(np.sum(lam > 1e-10 * lam[-1]))


def test_rejects_unnormalized_start():
    _, liou, v0 = qkr_state_case()
    bad = state_vector(v0.data * 2.0)
    with pytest.raises(UsageError):
        arnoldi_iterate(liou, bad, 5)


def test_rejects_kind_mismatch_and_bad_args():
    u, liou, v0 = qkr_state_case()
    with pytest.raises(UsageError):
        arnoldi_iterate(unitary_conjugation(u), v0, 5)
    with pytest.raises(UsageError):
        arnoldi_iterate(liou, v0, 0)
    with pytest.raises(UsageError):
        arnoldi_iterate(liou, v0, 5, tol=-1.0)


def test_larger_tol_terminates_no_later():
    _, liou, v0 = qkr_state_case(n=12, kappa=0.2)
    tight = arnoldi_iterate(liou, v0, 12, tol=1e-12)
    loose = arnoldi_iterate(liou, v0, 12, tol=1e-2)
    assert loose.dk <= tight.dk


def test_hessenberg_csv_round_trip(tmp_path):
    _, liou, v0 = qkr_state_case(n=5)
    basis = arnoldi_iterate(liou, v0, 5)
    path = tmp_path / "h.csv"
    write_hessenberg_csv(basis, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "j,k,re,im"
    rebuilt = np.zeros((basis.dk, basis.dk), dtype=np.complex128)
    for line in lines[1:]:
        j, k, re, im = line.split(",")
        rebuilt[int(j), int(k)] = float(re) + 1j * float(im)
    assert np.array_equal(rebuilt, basis.hessenberg)
    # only stored nonzeros: no rows below the subdiagonal
    assert len(lines) - 1 == sum(
        1 for j in range(basis.dk) for k in range(max(0, j - 1), basis.dk)
    )


def test_subdiagonal_csv(tmp_path):
    _, liou, v0 = qkr_state_case(n=6)
    basis = arnoldi_iterate(liou, v0, 6)
    path = tmp_path / "sub.csv"
    write_subdiagonal_csv(basis, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n,h"
    assert len(lines) - 1 == basis.dk - 1
    vals = [float(line.split(",")[1]) for line in lines[1:]]
    assert np.array_equal(np.array(vals), subdiagonal(basis))


def test_dump_basis_vectors_readable(tmp_path):
    u = build_toral_qkr(FloquetParams(n_dim=4, kappa=2.0, alpha=0.2, beta=0.3))
    liou = unitary_conjugation(u)
    v0 = initial_vectors("random_hermitian_operator", 4, seed=0)
    basis = arnoldi_iterate(liou, v0, 3)
    files = dump_basis_vectors(basis, tmp_path)
    assert len(files) == basis.dk
    import json

    first = json.loads(open(files[0]).read())
    got = np.array(first["re"]) + 1j * np.array(first["im"])
    assert np.max(np.abs(got - basis.stack[0].reshape(4, 4))) < 1e-15
