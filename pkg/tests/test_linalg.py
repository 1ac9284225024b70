import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian
from trifid.errors import DimensionMismatch, NoConvergence, NotHermitian, NotPSD, NotUnitary
from trifid.linalg import (
    check_unitary,
    hermitian_eig,
    hermitian_eig_batch,
    hs_inner,
    matrix_sqrt_psd,
    matrix_sqrt_psd_batch,
    max_overlap_unitary,
    operator_abs,
    polar_unitary,
    random_unitary,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])


def test_eig_scalar():
    w, v = hermitian_eig([[5.0]])
    assert np.allclose(w, [5.0])
    assert np.allclose(v, [[1.0]])


def test_eig_diagonal():
    w, v = hermitian_eig(np.diag([1.0, 3.0]))
    assert np.allclose(w, [1.0, 3.0])
    assert np.allclose(np.abs(v), np.eye(2))


def test_eig_pauli_x():
    w, _ = hermitian_eig(SX)
    assert np.allclose(w, [-1.0, 1.0], atol=1e-14)


@pytest.mark.parametrize("n", range(2, 9))
def test_eig_residual_and_orthonormality(rng, n):
    for _ in range(200):
        a = random_hermitian(rng, n)
        w, v = hermitian_eig(a)
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.abs(a - (v * w) @ v.conj().T)) <= 1e-10
        assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= 1e-10


def test_eig_batch_matches_single(rng):
    a = np.stack([random_hermitian(rng, 4) for _ in range(7)])
    w, v = hermitian_eig_batch(a)
    for i in range(7):
        wi, _ = hermitian_eig(a[i])
        assert np.allclose(w[i], wi, atol=1e-12)
        assert np.allclose(a[i] @ v[i], v[i] * w[i], atol=1e-10)


def test_eig_agrees_with_lapack(rng):
    a = random_hermitian(rng, 6)
    assert np.allclose(hermitian_eig(a).eigenvalues, np.linalg.eigvalsh(a), atol=1e-11)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig([[0.0, 1.0], [0.0, 0.0]])


def test_eig_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        hermitian_eig(np.zeros((2, 3)))


def test_eig_reports_no_convergence(rng):
    with pytest.raises(NoConvergence):
        hermitian_eig(random_hermitian(rng, 6), max_sweeps=1)


def test_sqrt_examples():
    assert np.allclose(matrix_sqrt_psd(np.eye(3)), np.eye(3))
    assert np.allclose(matrix_sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
    r = matrix_sqrt_psd([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(np.linalg.eigvalsh(r), [1.0, np.sqrt(3.0)])


def test_sqrt_clamps_roundoff_and_rejects_negative():
    r = matrix_sqrt_psd(np.diag([1.0, -5e-10]))
    assert np.allclose(r, np.diag([1.0, 0.0]))
    with pytest.raises(NotPSD):
        matrix_sqrt_psd(np.diag([1.0, -1e-6]))


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_sqrt_of_square(rng, n):
    for _ in range(50):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        s = matrix_sqrt_psd(g @ g.conj().T)
        s = s / np.max(np.abs(s))
        assert np.max(np.abs(matrix_sqrt_psd(s @ s) - s)) <= 1e-8


def test_sqrt_batch_shape(rng):
    g = rng.standard_normal((5, 3, 3))
    out = matrix_sqrt_psd_batch(g @ np.swapaxes(g, -1, -2))
    assert out.shape == (5, 3, 3)
    assert np.allclose(out @ out, g @ np.swapaxes(g, -1, -2), atol=1e-10)


def test_operator_abs_examples(rng):
    u = random_unitary(3, rng)
    assert np.allclose(operator_abs(u), np.eye(3), atol=1e-12)
    assert np.allclose(operator_abs(np.diag([-2.0, 3.0])), np.diag([2.0, 3.0]))
    assert np.allclose(operator_abs([[0.0, 1.0], [0.0, 0.0]]), np.diag([0.0, 1.0]))


def test_hs_inner_examples():
    assert hs_inner(np.eye(2), np.eye(2)) == 2
    assert hs_inner(SX, SY) == 0
    x = np.diag([1.0, 1j])
    assert np.isclose(hs_inner(x, x), 2.0)
    with pytest.raises(DimensionMismatch):
        hs_inner(np.eye(2), np.eye(3))


def test_max_overlap_examples():
    h = np.eye(2) / np.sqrt(2.0)
    assert np.isclose(max_overlap_unitary(h, h), 1.0)
    assert np.isclose(max_overlap_unitary(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])), 0.0)


def test_max_overlap_is_supremum_over_unitaries(rng):
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    best = max_overlap_unitary(a, b)
    # attained at W = U*, where AB = U|AB|
    u = polar_unitary(a @ b)
    assert np.isclose(abs(np.trace(a @ b @ u.conj().T)), best, atol=1e-10)
    for _ in range(200):
        w = random_unitary(3, rng)
        assert abs(np.trace(a @ b @ w)) <= best + 1e-10


def test_random_unitary_is_unitary(rng):
    for n in (1, 2, 5):
        u = random_unitary(n, rng)
        check_unitary(u)
    with pytest.raises(NotUnitary):
        check_unitary(np.diag([1.0, 2.0]))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_eig_property(n, seed):
    a = random_hermitian(np.random.default_rng(seed), n)
    w, v = hermitian_eig(a)
    assert np.max(np.abs(a - (v * w) @ v.conj().T)) <= 1e-10
    assert np.isclose(np.sum(w), np.trace(a).real, atol=1e-10)
