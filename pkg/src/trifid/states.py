"""State classes: probability measures, pure states, density matrices.

Also holds the Bloch-ball parameterisation of qubit states, the standard
purification and seeded random sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidState, OutOfRange, OutsideBall, WrongDimension
from .linalg import dagger, hermitian_eig, matrix_sqrt_psd

MEASURE_TOL = 1e-12
NORM_TOL = 1e-12
DENSITY_TOL = 1e-10
BALL_TOL = 1e-12

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ProbabilityMeasure:
    """Nonnegative weights summing to one over a finite event space."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise InvalidState("measure weights must be a non-empty vector")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidState("measure weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > MEASURE_TOL:
            raise InvalidState(f"measure weights sum to {w.sum():.15g}, not 1")
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def size(self) -> int:
        return self.weights.size


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector in C^d."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        if a.ndim != 1 or a.size == 0:
            raise InvalidState("amplitudes must be a non-empty vector")
        norm = np.linalg.norm(a)
        if not np.isfinite(norm) or abs(norm - 1.0) > NORM_TOL:
            raise InvalidState(f"state vector has norm {norm:.15g}, not 1")
        object.__setattr__(self, "amplitudes", _frozen(a))

    @classmethod
    def normalized(cls, vector) -> "PureState":
        v = np.asarray(vector, dtype=np.complex128)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise InvalidState("cannot normalise the zero vector")
        return cls(v / norm)

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray
    _eig: tuple = field(default=None, init=False, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise InvalidState(f"density matrix must be square, got shape {m.shape}")
        if np.max(np.abs(m - dagger(m))) > DENSITY_TOL:
            raise InvalidState("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > DENSITY_TOL:
            raise InvalidState(f"density matrix has trace {np.trace(m).real:.15g}, not 1")
        m = 0.5 * (m + dagger(m))
        eig = hermitian_eig(m)
        if eig.eigenvalues[0] < -DENSITY_TOL:
            raise InvalidState(f"density matrix has eigenvalue {eig.eigenvalues[0]:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "_eig", eig)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eig.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._eig.eigenvectors

    def sqrt(self) -> np.ndarray:
        return matrix_sqrt_psd(self.matrix)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.norm() > 1.0 + BALL_TOL:
            raise OutsideBall(f"Bloch vector has norm {self.norm():.15g} > 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "BlochVector":
        st = math.sin(theta)
        return cls(math.cos(phi) * st, math.sin(phi) * st, math.cos(theta))


@dataclass(frozen=True, eq=False)
class PurifiedState:
    vector: PureState
    source_dim: int

    def marginal(self) -> np.ndarray:
        """Partial trace over the second tensor factor."""
        d = self.source_dim
        m = self.vector.amplitudes.reshape(d, d)
        return m @ dagger(m)


def pure_to_density(phi: PureState) -> DensityMatrix:
    a = phi.amplitudes
    return DensityMatrix(np.outer(a, np.conj(a)))


def measure_to_density(mu: ProbabilityMeasure) -> DensityMatrix:
    return DensityMatrix(np.diag(mu.weights).astype(np.complex128))


def bloch_to_density(v: BlochVector) -> DensityMatrix:
    x = v.as_array()
    n = np.linalg.norm(x)
    if n > 1.0:
        x = x / n
    m = 0.5 * (np.eye(2) + sum(c * p for c, p in zip(x, PAULI)))
    return DensityMatrix(m)


def density_to_bloch(rho: DensityMatrix) -> BlochVector:
    if rho.dim != 2:
        raise WrongDimension(f"Bloch coordinates need a 2x2 density matrix, got dim {rho.dim}")
    coords = [float(np.real(np.trace(rho.matrix @ p))) for p in PAULI]
    n = math.sqrt(sum(c * c for c in coords))
    if 1.0 < n <= 1.0 + 10 * DENSITY_TOL:
        coords = [c / n for c in coords]
    return BlochVector(*coords)


def bloch_state_vector(theta: float, phi: float) -> PureState:
    """Section ``(cos(theta/2), e^{i phi} sin(theta/2))`` over the Bloch sphere.

    The angular domain is closed to ``theta in [0, pi]``, ``phi in [0, 2 pi)``
    so that both poles are reachable.
    """
    if not (0.0 <= theta <= math.pi):
        raise OutOfRange(f"theta={theta} outside [0, pi]")
    if not (0.0 <= phi < 2.0 * math.pi):
        raise OutOfRange(f"phi={phi} outside [0, 2pi)")
    return PureState(np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)]))


def bloch_angles(v: BlochVector) -> tuple[float, float]:
    """Spherical angles ``(theta, phi)`` of a Bloch vector, ``phi`` in ``[0, 2 pi)``."""
    n = v.norm()
    if n == 0:
        raise OutOfRange("the zero vector has no direction")
    theta = math.acos(max(-1.0, min(1.0, v.z / n)))
    phi = math.atan2(v.y, v.x) % (2.0 * math.pi)
    if phi >= 2.0 * math.pi:
        phi = 0.0
    return theta, phi


def purify(rho: DensityMatrix) -> PurifiedState:
    """Schmidt-form purification ``sum_j r_j^{1/2} f_j (x) conj(f_j)``.

    Conjugation is entrywise in the computational basis. The sum does not
    depend on the choice of eigenbasis, and as a d x d array it is just the
    matrix ``rho^{1/2}``.
    """
    r = np.clip(rho.eigenvalues, 0.0, None)
    f = rho.eigenvectors
    omega = np.zeros(rho.dim * rho.dim, dtype=np.complex128)
    for j in range(rho.dim):
        omega += math.sqrt(r[j]) * np.kron(f[:, j], np.conj(f[:, j]))
    return PurifiedState(PureState.normalized(omega), rho.dim)


def direct_sum_mix(rho1: DensityMatrix, rho2: DensityMatrix, t: float) -> DensityMatrix:
    """Block-diagonal ``t rho1 (+) (1 - t) rho2``."""
    if not (0.0 <= t <= 1.0):
        raise OutOfRange(f"mixing weight t={t} outside [0, 1]")
    d1, d2 = rho1.dim, rho2.dim
    m = np.zeros((d1 + d2, d1 + d2), dtype=np.complex128)
    m[:d1, :d1] = t * rho1.matrix
    m[d1:, d1:] = (1.0 - t) * rho2.matrix
    return DensityMatrix(m)


# --- seeded sampling -------------------------------------------------------
#
# Every random object is drawn from its own PCG64 generator whose seed is
# derived from (master seed, stream, index) by numpy's SeedSequence hashing.
# A sample therefore depends only on its index, never on how a campaign is
# chunked across workers.

def sample_rng(master_seed: int, *index: int) -> np.random.Generator:
    words = [int(master_seed) & 0xFFFFFFFFFFFFFFFF] + [int(i) for i in index]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))


def _gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def fix_global_phase(v: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Rotate ``v`` so that its first entry with modulus above ``tol`` is real positive."""
    nz = np.flatnonzero(np.abs(v) > tol)
    if nz.size == 0:
        return v
    lead = v[nz[0]]
    return v * (np.conj(lead) / abs(lead))


def random_pure_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = _gaussian(rng, dim)
    return fix_global_phase(z / np.linalg.norm(z))


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = _gaussian(rng, (dim, dim))
    w = g @ dagger(g)
    return w / np.trace(w).real


def random_pure(dim: int, seed: int) -> PureState:
    """Haar-random pure state, global phase fixed so the first amplitude is positive."""
    if dim < 1:
        raise OutOfRange("dimension must be positive")
    return PureState(random_pure_vector(dim, sample_rng(seed)))


def random_density(dim: int, seed: int) -> DensityMatrix:
    """Ginibre-ensemble density matrix ``G G* / tr(G G*)`` (full rank almost surely)."""
    if dim < 1:
        raise OutOfRange("dimension must be positive")
    return DensityMatrix(random_density_matrix(dim, sample_rng(seed)))
