"""Small dense complex linear algebra kernel.

Matrices are plain ``numpy`` complex128 arrays. The eigensolver is a cyclic
Jacobi iteration written against stacks of matrices of shape ``(..., n, n)``
so that Monte Carlo campaigns can push thousands of small matrices through a
single call; the single-matrix helpers are thin wrappers over the batched
versions.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotPSD, NotUnitary

HERMITIAN_TOL = 1e-9
PSD_CLAMP = -1e-9
OFF_DIAGONAL_TOL = 1e-13
MAX_SWEEPS = 100

_EPS = np.finfo(float).eps


class HermitianEigen(NamedTuple):
    """Eigenvalues in ascending order and the matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` into a square complex128 array (or a stack of them)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise DimensionMismatch(f"expected square matrix, got shape {m.shape}")
    if m.shape[-1] < 1:
        raise DimensionMismatch("matrix dimension must be at least 1")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def hermiticity_error(a: np.ndarray) -> np.ndarray:
    return np.max(np.abs(a - dagger(a)), axis=(-2, -1))


def _check_hermitian(a: np.ndarray, tol: float) -> np.ndarray:
    err = hermiticity_error(a)
    if np.any(err > tol):
        raise NotHermitian(f"matrix is not Hermitian (max |A - A*| = {np.max(err):.3e})")
    return 0.5 * (a + dagger(a))


def _jacobi_sweeps(a: np.ndarray, max_sweeps: int):
    """Run cyclic Jacobi sweeps over a stack ``a`` of Hermitian matrices.

    Each rotation first removes the phase of the pivot ``a[p, q]`` with a
    diagonal unitary and then applies the classical real rotation that
    annihilates it.
    """
    a = a.copy()
    batch, n = a.shape[0], a.shape[-1]
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape).copy()
    if n == 1:
        return a, v, 0

    scale = np.maximum(1.0, np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1))))
    offmask = ~np.eye(n, dtype=bool)
    rows = np.arange(batch)
    for sweep in range(max_sweeps + 1):
        off = np.sqrt(np.sum(np.abs(a[:, offmask]) ** 2, axis=-1))
        active = off > OFF_DIAGONAL_TOL * scale
        if not active.any():
            return a, v, sweep
        if sweep == max_sweeps:
            break
        idx = rows[active]
        sub_a = a[idx]
        sub_v = v[idx]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = sub_a[:, p, q]
                mag = np.abs(apq)
                nz = mag > 0.0
                safe = np.where(nz, mag, 1.0)
                phase = np.where(nz, apq / safe, 1.0)
                app = sub_a[:, p, p].real
                aqq = sub_a[:, q, q].real
                theta = (aqq - app) / (2.0 * safe)
                big = np.abs(theta) > 1e150
                theta_c = np.where(big, 0.0, theta)
                t = np.where(
                    big,
                    0.5 / np.where(big, theta, 1.0),
                    np.copysign(1.0, theta_c) / (np.abs(theta_c) + np.sqrt(theta_c * theta_c + 1.0)),
                )
                t = np.where(nz, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                pc = np.conj(phase)
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                j = np.empty((len(idx), 2, 2), dtype=np.complex128)
                j[:, 0, 0] = c
                j[:, 0, 1] = s
                j[:, 1, 0] = -s * pc
                j[:, 1, 1] = c * pc
                pq = [p, q]
                sub_a[:, :, pq] = sub_a[:, :, pq] @ j
                sub_a[:, pq, :] = dagger(j) @ sub_a[:, pq, :]
                sub_v[:, :, pq] = sub_v[:, :, pq] @ j
                sub_a[:, p, q] = 0.0
                sub_a[:, q, p] = 0.0
        a[idx] = sub_a
        v[idx] = sub_v
    raise NoConvergence(f"Jacobi iteration did not converge within {max_sweeps} sweeps")


def hermitian_eig_batch(a, tol: float = HERMITIAN_TOL, max_sweeps: int = MAX_SWEEPS) -> HermitianEigen:
    """Batched :func:`hermitian_eig` over the leading axes of ``a``."""
    m = as_matrix(a)
    lead, n = m.shape[:-2], m.shape[-1]
    flat = _check_hermitian(m.reshape((-1, n, n)), tol)
    d, v, _ = _jacobi_sweeps(flat, max_sweeps)
    w = np.real(np.diagonal(d, axis1=-2, axis2=-1))
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return HermitianEigen(w.reshape(lead + (n,)), v.reshape(lead + (n, n)))


def hermitian_eig(a, tol: float = HERMITIAN_TOL, max_sweeps: int = MAX_SWEEPS) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    The input is symmetrized as ``(A + A*)/2`` once it passes the Hermiticity
    check. Eigenvalues are returned in ascending order.

    Raises:
        NotHermitian: if ``max |A - A*| > tol``.
        NoConvergence: if the off-diagonal norm does not fall below
            ``1e-13 * max(1, ||A||_F)`` within ``max_sweeps`` sweeps.
    """
    m = as_matrix(a)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a single matrix, got shape {m.shape}")
    w, v = hermitian_eig_batch(m[None], tol, max_sweeps)
    return HermitianEigen(w[0], v[0])


def _clamp_spectrum(w: np.ndarray) -> np.ndarray:
    lowest = np.min(w)
    if lowest < PSD_CLAMP:
        raise NotPSD(f"matrix has eigenvalue {lowest:.3e} below {PSD_CLAMP:g}")
    n = w.shape[-1]
    # eigenvalues at the round-off floor are zero for all practical purposes;
    # leaving them in would contribute sqrt(eps) to square roots.
    floor = 4.0 * n * _EPS * np.max(np.abs(w), axis=-1, keepdims=True)
    return np.where(w <= floor, 0.0, w)


def _reassemble(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    return (v * w[..., None, :]) @ dagger(v)


def matrix_sqrt_psd_batch(a) -> np.ndarray:
    w, v = hermitian_eig_batch(a)
    return _reassemble(v, np.sqrt(_clamp_spectrum(w)))


def matrix_sqrt_psd(a) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``[-1e-9, 0)`` are treated as round-off and clamped to zero.
    """
    m = as_matrix(a)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a single matrix, got shape {m.shape}")
    return matrix_sqrt_psd_batch(m[None])[0]


def operator_abs(x) -> np.ndarray:
    """``|X| = (X* X)^{1/2}``."""
    m = as_matrix(x)
    return matrix_sqrt_psd(dagger(m) @ m)


def trace_abs_batch(x) -> np.ndarray:
    """``tr |X|`` (the sum of singular values) for a stack of matrices."""
    m = as_matrix(x)
    w, _ = hermitian_eig_batch(dagger(m) @ m)
    return np.sum(np.sqrt(_clamp_spectrum(w)), axis=-1)


def hs_inner(x, y) -> complex:
    """Hilbert-Schmidt inner product ``tr X* Y`` (conjugate-linear in ``x``)."""
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if x.shape != y.shape:
        raise DimensionMismatch(f"shapes {x.shape} and {y.shape} differ")
    return complex(np.vdot(x, y))


def max_overlap_unitary(a, b) -> float:
    """``sup_W |tr(A B W)|`` over unitaries ``W``, which equals ``tr |A B|``."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return float(np.real(np.trace(operator_abs(a @ b))))


def polar_unitary(x) -> np.ndarray:
    """Unitary factor ``U`` of ``X = U |X|`` for invertible ``X``."""
    m = as_matrix(x)
    w, v = hermitian_eig(dagger(m) @ m)
    if np.min(w) <= 0.0:
        raise NotPSD("polar unitary requires an invertible matrix")
    inv_abs = _reassemble(v, 1.0 / np.sqrt(w))
    return m @ inv_abs


def is_unitary(u, tol: float = 1e-9) -> bool:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))) <= tol)


def check_unitary(u, tol: float = 1e-9) -> np.ndarray:
    m = as_matrix(u)
    if not is_unitary(m, tol):
        raise NotUnitary("matrix is not unitary within tolerance")
    return m


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix.

    The diagonal of ``R`` is phase-corrected so that the distribution is
    exactly Haar and not biased by the QR sign convention.
    """
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
