import numpy as np
import pytest
from hypothesis import given, strategies as st

from qrframes import linalg
from qrframes.errors import DimensionError, ShapeError

SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
seeds = st.integers(0, 2**32 - 1)


def test_tensor_basics():
    assert np.array_equal(linalg.tensor(np.eye(2), np.eye(2)), np.eye(4))
    assert np.array_equal(linalg.tensor(SZ, np.eye(2)), np.diag([1, 1, -1, -1]))
    out = linalg.tensor(linalg.projector(linalg.basis_ket(2, 0)), SX) @ linalg.basis_ket(4, 0)
    assert np.array_equal(out, linalg.basis_ket(4, 1))


@given(seeds)
def test_tensor_associative(seed):
    r = np.random.default_rng(seed)
    # integer entries: every product is exact, so equality is bitwise
    a, b, c = (r.integers(-9, 10, size=(2, 3)).astype(float) for _ in range(3))
    assert np.array_equal(linalg.tensor(linalg.tensor(a, b), c), linalg.tensor(a, linalg.tensor(b, c)))


def test_partial_trace_examples(rng):
    rho = linalg.projector(PSI_MINUS)
    assert np.allclose(linalg.partial_trace(rho, (2, 2), 0), np.eye(2) / 2, atol=1e-15)
    a, b = linalg.random_density_matrix(2, rng), linalg.random_density_matrix(3, rng)
    assert np.allclose(linalg.partial_trace(np.kron(a, b), (2, 3), 1), b, atol=1e-14)
    psi = linalg.random_pure_state(8, rng)
    red = linalg.partial_trace(linalg.projector(psi), (2, 2, 2), (0, 2))
    assert abs(np.trace(red) - 1) < 1e-12


def test_partial_trace_against_direct_sum(rng):
    rho = linalg.random_density_matrix(12, rng)
    direct = sum(rho[i * 4:(i + 1) * 4, i * 4:(i + 1) * 4] for i in range(3))
    assert np.allclose(linalg.partial_trace(rho, (3, 4), 1), direct, atol=1e-14)


def test_partial_transpose_examples(rng):
    pt = linalg.partial_transpose(linalg.projector(PSI_MINUS), (2, 2), 1)
    assert np.allclose(np.sort(np.linalg.eigvalsh(pt)), [-0.5, 0.5, 0.5, 0.5], atol=1e-14)
    prod = np.kron(linalg.random_density_matrix(2, rng), linalg.random_density_matrix(2, rng))
    assert np.allclose(np.linalg.eigvalsh(linalg.partial_transpose(prod, (2, 2), 1)),
                       np.linalg.eigvalsh(prod), atol=1e-14)
    rho = linalg.random_density_matrix(6, rng)
    twice = linalg.partial_transpose(linalg.partial_transpose(rho, (2, 3), 0), (2, 3), 0)
    assert np.array_equal(twice, rho)


@given(seeds)
def test_partial_transpose_keeps_other_marginal(seed):
    rho = linalg.random_density_matrix(6, linalg.make_rng(seed))
    pt = linalg.partial_transpose(rho, (2, 3), 1)
    assert np.abs(linalg.partial_trace(pt, (2, 3), 0) - linalg.partial_trace(rho, (2, 3), 0)).max() <= 1e-12


def test_dimension_errors():
    with pytest.raises(DimensionError):
        linalg.partial_trace(np.eye(4), (2, 3), 0)
    with pytest.raises(DimensionError):
        linalg.partial_transpose(np.eye(4), (3, 3), 1)


def test_eigh_examples():
    w, v = linalg.eigh(SZ)
    assert np.allclose(w, [-1, 1])
    assert abs(abs(v[1, 0]) - 1) < 1e-15 and abs(abs(v[0, 1]) - 1) < 1e-15
    assert np.allclose(linalg.eigh(np.eye(5))[0], 1)
    with pytest.raises(ShapeError):
        linalg.eigh(np.array([[0, 1], [0, 0]], dtype=complex))


@given(seeds, st.integers(1, 24))
def test_eigh_contract(seed, dim):
    m = linalg.random_density_matrix(dim, linalg.make_rng(seed)) - 0.3 * np.eye(dim)
    w, v = linalg.eigh(m)
    assert np.abs(v.conj().T @ v - np.eye(dim)).max() <= 1e-10
    assert np.abs(v @ np.diag(w) @ v.conj().T - m).max() <= 1e-10


def test_trace_norm_examples(rng):
    assert abs(linalg.trace_norm(linalg.random_density_matrix(5, rng)) - 1) < 1e-12
    assert abs(linalg.trace_norm(SZ) - 2) < 1e-15
    pt = linalg.partial_transpose(linalg.projector(PSI_MINUS), (2, 2), 1)
    assert abs(linalg.trace_norm(pt) - 2) < 1e-14


@given(seeds, st.integers(2, 64))
def test_trace_norm_unitary_invariant(seed, dim):
    r = linalg.make_rng(seed)
    m = r.standard_normal((dim, dim)) + 1j * r.standard_normal((dim, dim))
    m = m + m.conj().T
    u = linalg.haar_unitary(dim, r)
    assert abs(linalg.trace_norm(u @ m @ u.conj().T) - linalg.trace_norm(m)) <= 1e-9 * max(1, linalg.trace_norm(m))


def test_rng_streams_reproducible():
    a = linalg.make_rng(7).standard_normal(5)
    b = linalg.make_rng(7).standard_normal(5)
    assert np.array_equal(a, b)
    c1 = [g.standard_normal(3) for g in linalg.derived_rngs(7, 3)]
    c2 = [g.standard_normal(3) for g in linalg.derived_rngs(7, 3)]
    assert all(np.array_equal(x, y) for x, y in zip(c1, c2))
    assert not np.array_equal(c1[0], c1[1])


def test_random_states_valid(rng):
    psi = linalg.random_pure_state(6, rng)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    rho = linalg.random_density_matrix(6, rng, rank=2)
    assert linalg.is_hermitian(rho) and abs(np.trace(rho) - 1) < 1e-12
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 2
    assert linalg.von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)
