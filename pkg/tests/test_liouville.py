import numpy as np
import pytest

from floqrylov.errors import UsageError, ValidationError
from floqrylov.liouville import (
    KrylovVector,
    apply,
    apply_flat,
    hermitian_commutator,
    hermitian_on_state,
    initial_vectors,
    inner,
    inner_weight,
    norm,
    normalized,
    operator_vector,
    state_vector,
    unitary_conjugation,
    unitary_on_state,
)
from floqrylov.maps import FloquetParams, build_toral_qkr


def random_unitary(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def test_vector_kind_from_shape():
    assert KrylovVector(np.ones(3, dtype=complex)).kind == "state"
    assert KrylovVector(np.eye(3, dtype=complex)).kind == "operator"
    assert state_vector([1.0, 0.0]).n_dim == 2
    assert operator_vector(np.eye(4)).n_dim == 4


def test_vector_validation():
    with pytest.raises(UsageError):
        KrylovVector(np.ones((2, 3)))
    with pytest.raises(UsageError):
        KrylovVector(np.array([1.0, np.nan]))
    with pytest.raises(UsageError):
        state_vector(np.eye(2))


def test_inner_weight_convention():
    # operators use Tr(A^dag B)/N, states a plain dot product
    assert inner_weight("state", 7) == 1.0
    assert inner_weight("operator", 7) == pytest.approx(1.0 / 7)
    ident = operator_vector(np.eye(7))
    assert abs(inner(ident, ident) - 1.0) < 1e-15


def test_inner_matches_trace_formula():
    rng = np.random.default_rng(5)
    n = 4
    a = operator_vector(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    b = operator_vector(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    ref = np.trace(a.data.conj().T @ b.data) / n
    assert abs(inner(a, b) - ref) < 1e-13


def test_inner_rejects_kind_mismatch():
    with pytest.raises(UsageError):
        inner(state_vector(np.ones(2)), operator_vector(np.eye(2)))


def test_normalized_and_zero_vector():
    v = normalized(state_vector([3.0, 4.0]))
    assert abs(norm(v) - 1.0) < 1e-15
    with pytest.raises(UsageError):
        normalized(state_vector([0.0, 0.0]))


def test_unitary_on_state_matches_matvec():
    u = random_unitary(5, 1)
    liou = unitary_on_state(u)
    v = state_vector(np.arange(5) + 0.5j)
    assert np.allclose(apply(liou, v).data, u @ v.data, atol=1e-13)
    assert liou.acts_on == "state"
    assert liou.is_unitary and not liou.is_hermitian


def test_unitary_conjugation_matches_sandwich():
    u = random_unitary(4, 2)
    liou = unitary_conjugation(u)
    o = random_hermitian(4, 3)
    got = apply(liou, operator_vector(o)).data
    assert np.allclose(got, u.conj().T @ o @ u, atol=1e-13)
    assert liou.acts_on == "operator"


def test_hermitian_on_state_matches_matvec():
    h = random_hermitian(6, 4)
    liou = hermitian_on_state(h)
    v = state_vector(np.ones(6))
    assert np.allclose(apply(liou, v).data, h @ v.data, atol=1e-13)
    assert liou.is_hermitian and not liou.is_unitary


def test_hermitian_commutator_matches_bracket():
    h = random_hermitian(3, 7)
    liou = hermitian_commutator(h)
    o = random_hermitian(3, 8)
    got = apply(liou, operator_vector(o)).data
    assert np.allclose(got, h @ o - o @ h, atol=1e-13)


def test_hermitian_constructors_reject_nonhermitian():
    with pytest.raises(ValidationError):
        hermitian_on_state(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValidationError):
        hermitian_commutator(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_unitary_variants_preserve_norm():
    u = build_toral_qkr(FloquetParams(n_dim=6, kappa=4.0, alpha=0.2, beta=0.3))
    sl = unitary_on_state(u)
    ol = unitary_conjugation(u)
    for seed in range(5):
        v = initial_vectors("random_state", 6, seed=seed)
        assert abs(norm(apply(sl, v)) - 1.0) < 1e-12
        o = initial_vectors("random_hermitian_operator", 6, seed=seed)
        assert abs(norm(apply(ol, o)) - 1.0) < 1e-12


def test_commutator_superoperator_is_selfadjoint():
    """(A | [H,B]) == conj((B | [H,A])) under the trace inner product."""
    h = random_hermitian(4, 11)
    liou = hermitian_commutator(h)
    rng = np.random.default_rng(12)
    for _ in range(5):
        a = operator_vector(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        b = operator_vector(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        lhs = inner(a, apply(liou, b))
        rhs = inner(apply(liou, a), b)
        assert abs(lhs - rhs) < 1e-12


def test_apply_rejects_kind_mismatch():
    u = random_unitary(3, 0)
    with pytest.raises(UsageError):
        apply(unitary_on_state(u), operator_vector(np.eye(3)))
    with pytest.raises(UsageError):
        apply(unitary_conjugation(u), state_vector(np.ones(3)))


def test_apply_flat_round_trips_operator_shape():
    u = random_unitary(3, 9)
    liou = unitary_conjugation(u)
    o = random_hermitian(3, 10)
    flat = apply_flat(liou, o.ravel())
    assert flat.shape == (9,)
    assert np.allclose(flat.reshape(3, 3), u.conj().T @ o @ u, atol=1e-13)


def test_position_state_descriptor():
    v = initial_vectors("position_state:2", 5)
    expected = np.zeros(5)
    expected[2] = 1.0
    assert np.array_equal(v.data, expected.astype(complex))


def test_momentum_state_descriptor_is_plane_wave():
    v = initial_vectors("momentum_state:1", 4)
    idx = np.arange(4)
    assert np.allclose(v.data, np.exp(2j * np.pi * idx / 4) / 2.0, atol=1e-15)
    assert abs(norm(v) - 1.0) < 1e-14


def test_uniform_state_descriptor():
    v = initial_vectors("uniform_state", 9)
    assert np.allclose(v.data, 1.0 / 3.0)


def test_operator_descriptors_are_normalized():
    for name in ("position_operator", "momentum_operator", "identity_operator",
                  "random_hermitian_operator", "basis_operator:0,1"):
        v = initial_vectors(name, 4, seed=3)
        assert v.kind == "operator"
        assert abs(norm(v) - 1.0) < 1e-12, name


def test_position_operator_diagonal_values():
    v = initial_vectors("position_operator", 2)
    # diag(0, 1/2) normalized under the weighted norm: sqrt(tr(A^2)/2) = 1
    ref = np.diag([0.0, 0.5])
    ref = ref / np.sqrt(np.trace(ref @ ref).real / 2)
    assert np.allclose(v.data, ref, atol=1e-14)


def test_momentum_operator_hermitian():
    v = initial_vectors("momentum_operator", 6)
    assert np.max(np.abs(v.data - v.data.conj().T)) < 1e-13


def test_basis_operator_entries():
    v = initial_vectors("basis_operator:1,2", 3)
    assert abs(v.data[1, 2] - np.sqrt(3)) < 1e-14
    assert np.count_nonzero(v.data) == 1


def test_random_descriptors_are_seed_deterministic():
    a = initial_vectors("random_state", 8, seed=42)
    b = initial_vectors("random_state", 8, seed=42)
    c = initial_vectors("random_state", 8, seed=43)
    assert np.array_equal(a.data, b.data)
    assert not np.array_equal(a.data, c.data)
    ha = initial_vectors("random_hermitian_operator", 5, seed=1)
    hb = initial_vectors("random_hermitian_operator", 5, seed=1)
    assert np.array_equal(ha.data, hb.data)
    assert np.max(np.abs(ha.data - ha.data.conj().T)) < 1e-14


def test_descriptor_errors():
    with pytest.raises(UsageError):
        initial_vectors("no_such_thing", 4)
    with pytest.raises(UsageError):
        initial_vectors("position_state", 4)  # missing index
    with pytest.raises(UsageError):
        initial_vectors("position_state:9", 4)  # out of range
    with pytest.raises(UsageError):
        initial_vectors("basis_operator:0", 4)  # needs two indices
    with pytest.raises(UsageError):
        initial_vectors("position_state:x", 4)
    with pytest.raises(UsageError):
        initial_vectors("uniform_state", 0)
