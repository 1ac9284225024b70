"""Fidelities between measures, pure states and density matrices."""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatch, SizeMismatch
from .linalg import as_matrix, matrix_sqrt_psd, matrix_sqrt_psd_batch, trace_abs_batch
from .states import BlochVector, DensityMatrix, ProbabilityMeasure, PureState

BOUNDARY_CLAMP = 1e-9


def clamp_unit(f: float) -> float:
    """Snap values that overshoot [0, 1] by at most 1e-9 back onto the interval."""
    if -BOUNDARY_CLAMP <= f < 0.0:
        return 0.0
    if 1.0 < f <= 1.0 + BOUNDARY_CLAMP:
        return 1.0
    return f


def _clamp_unit_array(f: np.ndarray) -> np.ndarray:
    f = np.where((f < 0.0) & (f >= -BOUNDARY_CLAMP), 0.0, f)
    return np.where((f > 1.0) & (f <= 1.0 + BOUNDARY_CLAMP), 1.0, f)


def affinity(lam: ProbabilityMeasure, mu: ProbabilityMeasure) -> float:
    """Classical affinity ``sum_j sqrt(lam_j mu_j)``."""
    if lam.size != mu.size:
        raise SizeMismatch(f"event spaces of size {lam.size} and {mu.size}")
    return clamp_unit(float(np.sum(np.sqrt(lam.weights * mu.weights))))


def fidelity_classical(lam: ProbabilityMeasure, mu: ProbabilityMeasure) -> float:
    return clamp_unit(affinity(lam, mu) ** 2)


def hellinger_sq(lam: ProbabilityMeasure, mu: ProbabilityMeasure) -> float:
    """Squared Hellinger distance ``1 - A(lam; mu)``."""
    return 1.0 - affinity(lam, mu)


def fidelity_pure(phi: PureState, psi: PureState) -> float:
    """Transition probability ``|<phi, psi>|^2``."""
    if phi.dim != psi.dim:
        raise DimensionMismatch(f"dimensions {phi.dim} and {psi.dim} differ")
    return clamp_unit(abs(np.vdot(phi.amplitudes, psi.amplitudes)) ** 2)


def _density_array(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return as_matrix(rho)


def sqrt_fidelity_uhlmann_batch(rhos, sigmas) -> np.ndarray:
    """``tr |rho^{1/2} sigma^{1/2}|`` for stacks of density matrices."""
    a = as_matrix(rhos)
    b = as_matrix(sigmas)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return trace_abs_batch(matrix_sqrt_psd_batch(a) @ matrix_sqrt_psd_batch(b))


def fidelity_from_roots_batch(root_a: np.ndarray, root_b: np.ndarray) -> np.ndarray:
    """Uhlmann fidelity from precomputed matrix square roots."""
    return _clamp_unit_array(trace_abs_batch(root_a @ root_b) ** 2)


def fidelity_uhlmann_batch(rhos, sigmas) -> np.ndarray:
    return _clamp_unit_array(sqrt_fidelity_uhlmann_batch(rhos, sigmas) ** 2)


def fidelity_uhlmann(rho, sigma) -> float:
    """Uhlmann fidelity ``(tr sqrt(rho^{1/2} sigma rho^{1/2}))^2``.

    Evaluated as the squared trace norm of ``rho^{1/2} sigma^{1/2}``, which
    avoids a nested square root. Accepts :class:`DensityMatrix` values or raw
    arrays (the latter are only checked for shape).
    """
    a = _density_array(rho)
    b = _density_array(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return clamp_unit(float(fidelity_uhlmann_batch(a[None], b[None])[0]))


def fidelity_uhlmann_nested(rho, sigma) -> float:
    """Literal nested-root form of the Uhlmann fidelity, kept as a cross-check."""
    a = _density_array(rho)
    b = _density_array(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    ra = matrix_sqrt_psd(a)
    inner = ra @ b @ ra
    inner = 0.5 * (inner + inner.conj().T)
    return clamp_unit(float(np.real(np.trace(matrix_sqrt_psd(inner)))) ** 2)


def fidelity_bloch2d(x: BlochVector, y: BlochVector) -> float:
    """Qubit closed form ``(1 + x.y + sqrt(1-|x|^2) sqrt(1-|y|^2)) / 2``."""
    xv, yv = x.as_array(), y.as_array()
    rx = math.sqrt(max(0.0, 1.0 - float(xv @ xv)))
    ry = math.sqrt(max(0.0, 1.0 - float(yv @ yv)))
    return clamp_unit(0.5 * (1.0 + float(xv @ yv) + rx * ry))
