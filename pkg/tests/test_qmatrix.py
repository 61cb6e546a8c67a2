import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinepr.errors import ContractViolation, DimensionError
from spinepr.qmatrix import (
    DensityMatrix,
    Observable,
    expectation,
    hermitian_eigenvalues,
    partial_trace,
    partial_transpose,
    tensor_product,
    variance,
)
from spinepr.states import bell_singlet, lossy_state_closed_form, number_operator, spin_operator, werner_state

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2)

dims_strategy = st.lists(st.integers(1, 3), min_size=1, max_size=3)


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_density(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def test_tensor_product_identities():
    assert np.allclose(tensor_product(I2, I2), np.eye(4))
    assert np.allclose(tensor_product(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))


def test_index_convention_first_factor_slowest():
    # |1><1| x |0><0| on dims (2, 3) sits at flat index 3
    m = tensor_product(np.diag([0, 1]), np.diag([1, 0, 0]))
    assert np.flatnonzero(np.diag(m)).tolist() == [3]


def test_sigma_z_correlation_on_singlet():
    assert expectation(tensor_product(SZ, SZ), bell_singlet()) == pytest.approx(-1.0, abs=1e-14)


def test_partial_transpose_singlet_spectrum():
    ev = hermitian_eigenvalues(partial_transpose(bell_singlet().matrix, (2, 2), 1))
    assert np.allclose(ev, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


def test_partial_transpose_werner_p1_spectrum():
    ev = hermitian_eigenvalues(partial_transpose(werner_state(1.0).matrix, (2, 2), 0))
    assert np.allclose(ev, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 2**32 - 1), data=st.data())
def test_partial_transpose_involution(dims, seed, data):
    rng = np.random.default_rng(seed)
    n = int(np.prod(dims))
    m = random_hermitian(rng, n)
    k = data.draw(st.integers(0, len(dims) - 1))
    twice = partial_transpose(partial_transpose(m, dims, k), dims, k)
    assert np.max(np.abs(twice - m)) <= 1e-14
    assert np.trace(partial_transpose(m, dims, k)) == pytest.approx(np.trace(m), abs=1e-12)


def test_partial_transpose_product_state_is_positive():
    rng = np.random.default_rng(3)
    rho = tensor_product(random_density(rng, 3), random_density(rng, 3))
    assert hermitian_eigenvalues(partial_transpose(rho, (3, 3), 1))[0] >= -1e-12


def test_partial_trace_singlet_marginal():
    assert np.allclose(partial_trace(bell_singlet().matrix, (2, 2), [0]), I2 / 2, atol=1e-15)
    assert np.allclose(partial_trace(bell_singlet().matrix, (2, 2), [1]), I2 / 2, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(da=st.integers(1, 4), db=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_partial_trace_recovers_factors(da, db, seed):
    rng = np.random.default_rng(seed)
    ra, rb = random_density(rng, da), random_density(rng, db)
    rho = tensor_product(ra, rb)
    assert np.allclose(partial_trace(rho, (da, db), [0]), ra, atol=1e-13)
    assert np.allclose(partial_trace(rho, (da, db), [1]), rb, atol=1e-13)


def test_partial_trace_three_factors_preserves_trace():
    rng = np.random.default_rng(0)
    m = random_hermitian(rng, 12)
    for keep in ([0], [1], [2], [0, 2], [1, 2]):
        assert np.trace(partial_trace(m, (2, 3, 2), keep)) == pytest.approx(np.trace(m), abs=1e-12)


def test_dimension_errors():
    with pytest.raises(DimensionError):
        partial_transpose(np.eye(4), (2, 3), 0)
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4), (2, 2), [])
    with pytest.raises(DimensionError):
        partial_transpose(np.eye(4), (2, 2), 2)


def test_eigenvalues_simple():
    assert np.allclose(hermitian_eigenvalues(np.eye(4)), 1)
    assert np.allclose(hermitian_eigenvalues(SX), [-1, 1])


def test_non_hermitian_rejected():
    with pytest.raises(ContractViolation):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))


def test_tiny_asymmetry_is_symmetrized():
    m = np.diag([1.0, 2.0]).astype(complex)
    m[0, 1] = 1e-13
    assert np.allclose(hermitian_eigenvalues(m), [1, 2])


@pytest.mark.parametrize("n", [2, 9, 64, 256])
def test_spectrum_sum_and_residual(n):
    rng = np.random.default_rng(n)
    m = random_hermitian(rng, n)
    ev = hermitian_eigenvalues(m)
    assert np.all(np.diff(ev) >= 0)
    assert ev.sum() == pytest.approx(np.trace(m).real, abs=1e-10)
    vals, vecs = Observable(m).eigh
    assert np.max(np.linalg.norm(m @ vecs - vecs * vals, axis=0)) <= 1e-9


@pytest.mark.parametrize("n", [2, 4, 9, 16])
def test_density_spectrum_in_unit_interval(n):
    rng = np.random.default_rng(n)
    ev = DensityMatrix(random_density(rng, n), (n,)).eigenvalues()
    assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10


def test_expectation_and_variance():
    rho = lossy_state_closed_form(0.3, 0.6)
    assert expectation(np.eye(9), rho) == pytest.approx(1.0, abs=1e-14)
    assert variance(np.eye(9), rho) == pytest.approx(0.0, abs=1e-14)
    assert expectation(number_operator("A"), rho) == pytest.approx(0.6, abs=1e-14)
    jz = spin_operator("A", "z", "qubit_pair") + spin_operator("B", "z", "qubit_pair")
    assert variance(jz, bell_singlet()) == pytest.approx(0.0, abs=1e-15)
    jzjz = spin_operator("A", "z", "qubit_pair") @ spin_operator("B", "z", "qubit_pair")
    assert expectation(jzjz, bell_singlet()) == pytest.approx(-0.25, abs=1e-15)
    for p in (0.0, 0.4, 1.0):
        assert variance(spin_operator("A", "z", "qubit_pair"), werner_state(p)) == pytest.approx(0.25)


def test_expectation_rejects_complex_value():
    with pytest.raises(ContractViolation):
        expectation(np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]]) * 1j)


def test_density_matrix_json_round_trip():
    rho = lossy_state_closed_form(0.7, 0.4)
    d = rho.to_json_dict()
    assert set(d) == {"dim", "dims", "re", "im"}
    back = DensityMatrix.from_json_dict(d)
    assert back.dims == (3, 3) and back.allclose(rho, atol=0)


def test_density_matrix_is_read_only():
    rho = werner_state(0.5)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1
