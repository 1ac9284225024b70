"""Three-state phase invariant.

For pure states the phase is the argument of the cyclic product
``<phi1, phi2><phi2, phi3><phi3, phi1>``. The mixed-state variant optimises
over the unitary freedom in the purifications and is experimental.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from .errors import (
    AntipodalPair,
    DegenerateSpectrum,
    DimensionMismatch,
    OptimizerFailed,
    RankDeficient,
    ZeroFidelity,
)
from .linalg import check_unitary, dagger, matrix_sqrt_psd
from .states import BlochVector, DensityMatrix, PureState, purify

ZERO_FIDELITY_TOL = 1e-12
UNIT_TOL = 1e-9


def canonical_angle(x: float) -> float:
    """Map an angle onto ``(-pi, pi]``."""
    y = math.remainder(x, 2.0 * math.pi)
    if y <= -math.pi:
        y += 2.0 * math.pi
    return y


@dataclass(frozen=True)
class PhaseValue:
    radians: float

    def __post_init__(self):
        object.__setattr__(self, "radians", canonical_angle(float(self.radians)))

    def __float__(self) -> float:
        return self.radians


@dataclass(frozen=True)
class BargmannProduct:
    value: complex
    modulus: float


def _same_dim(*states: PureState) -> None:
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise DimensionMismatch(f"states have dimensions {sorted(dims)}")


def bargmann_product(phi1: PureState, phi2: PureState, phi3: PureState) -> BargmannProduct:
    _same_dim(phi1, phi2, phi3)
    a, b, c = phi1.amplitudes, phi2.amplitudes, phi3.amplitudes
    value = complex(np.vdot(a, b) * np.vdot(b, c) * np.vdot(c, a))
    return BargmannProduct(value, abs(value))


def phase_pure(phi1: PureState, phi2: PureState, phi3: PureState, tol: float = ZERO_FIDELITY_TOL) -> PhaseValue:
    """Argument of the Bargmann product, in ``(-pi, pi]``.

    Raises:
        ZeroFidelity: if any pairwise fidelity is at most ``tol``; the phase
            has no continuous extension there.
    """
    _same_dim(phi1, phi2, phi3)
    states = (phi1, phi2, phi3)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        f = abs(np.vdot(states[i].amplitudes, states[j].amplitudes)) ** 2
        if f <= tol:
            raise ZeroFidelity(f"states {i + 1} and {j + 1} have fidelity {f:.3e}", triple=(1, 2, 3))
    return PhaseValue(cmath.phase(bargmann_product(phi1, phi2, phi3).value))


def _unit_vectors(*vs: BlochVector) -> list[np.ndarray]:
    out = []
    for v in vs:
        x = v.as_array()
        n = np.linalg.norm(x)
        if abs(n - 1.0) > UNIT_TOL:
            raise ValueError(f"expected a unit Bloch vector, got norm {n}")
        out.append(x / n)
    return out


def _angular_distance(x: np.ndarray, y: np.ndarray) -> float:
    # atan2 form stays accurate for nearly equal or nearly antipodal vectors
    return math.atan2(float(np.linalg.norm(np.cross(x, y))), float(x @ y))


def _angles(x: BlochVector, y: BlochVector, z: BlochVector) -> tuple[float, float, float]:
    xv, yv, zv = _unit_vectors(x, y, z)
    angles = (_angular_distance(xv, yv), _angular_distance(yv, zv), _angular_distance(zv, xv))
    for name, theta in zip(("xy", "yz", "zx"), angles):
        if math.pi - theta <= UNIT_TOL:
            raise AntipodalPair(f"pair {name} is antipodal")
    return angles


def phase_bloch_cos(x: BlochVector, y: BlochVector, z: BlochVector) -> float:
    """cos of the phase of three qubit pure states from their angular distances.

    Only the cosine is available from the angles; the sign of the phase
    needs the state vectors themselves.
    """
    cxy, cyz, czx = (math.cos(theta / 2.0) for theta in _angles(x, y, z))
    value = (cxy * cxy + cyz * cyz + czx * czx - 1.0) / (2.0 * cxy * cyz * czx)
    return max(-1.0, min(1.0, value))


def collinearity_test(x: BlochVector, y: BlochVector, z: BlochVector, tol: float = 1e-9) -> bool:
    """True when one angular distance is the sum of the other two (phase zero)."""
    angles = _angles(x, y, z)
    return any(abs(a - (b + c)) <= tol for a, b, c in permutations(angles))


# --- mixed states -------------------------------------------------------------

def purified_overlap(rho: DensityMatrix, sigma: DensityMatrix, u, v) -> complex:
    """``<(1 (x) conj U) Omega_rho, (1 (x) conj V) Omega_sigma> = tr(rho^{1/2} sigma^{1/2} V* U)``."""
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"dimensions {rho.dim} and {sigma.dim} differ")
    u = check_unitary(u)
    v = check_unitary(v)
    if u.shape[0] != rho.dim or v.shape[0] != rho.dim:
        raise DimensionMismatch("unitaries must match the state dimension")
    return complex(np.trace(rho.sqrt() @ sigma.sqrt() @ dagger(v) @ u))


def twisted_purification(rho: DensityMatrix, u) -> np.ndarray:
    """The vector ``(1 (x) conj U) Omega_rho`` in the doubled space."""
    u = check_unitary(u)
    return np.kron(np.eye(rho.dim), np.conj(u)) @ purify(rho).vector.amplitudes


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 20
    max_iters: int = 500
    tol: float = 1e-6
    seed: int = 0
    overlap_tol: float = 1e-9

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizerConfig":
        known = {k: d[k] for k in ("restarts", "max_iters", "tol", "seed") if k in d}
        unknown = set(d) - {"restarts", "max_iters", "tol", "seed"}
        if unknown:
            raise ValueError(f"unknown optimizer config keys: {sorted(unknown)}")
        return cls(**known)


@dataclass(frozen=True)
class MixedPhaseResult:
    phase: float
    objective: float
    restarts: int
    experimental: bool = True
    unitaries: tuple = field(default=(), repr=False, compare=False)

    def to_dict(self) -> dict:
        return {"phase": self.phase, "objective": self.objective, "experimental": True}


def _antihermitian(params: np.ndarray, d: int) -> np.ndarray:
    m = (params[: d * d] + 1j * params[d * d:]).reshape(d, d)
    return 0.5 * (m - dagger(m))


def _check_spectrum(rho: DensityMatrix, label: int, tol: float) -> None:
    w = rho.eigenvalues
    if w[0] <= tol:
        raise RankDeficient(f"state {label} has eigenvalue {w[0]:.3e}; full rank is required")
    if w.size > 1 and np.min(np.diff(w)) <= tol:
        raise DegenerateSpectrum(f"state {label} has a degenerate spectrum")


def phase_mixed_variational(
    rho1: DensityMatrix,
    rho2: DensityMatrix,
    rho3: DensityMatrix,
    config: OptimizerConfig | None = None,
) -> MixedPhaseResult:
    """Experimental mixed-state phase: minimise ``|e^{i Phi} - 1|`` over purifications.

    With ``A_j = rho_j^{1/2}`` the purified overlaps are
    ``tr(A_j A_k U_k* U_j)``. Only the products ``U_k* U_j`` enter, so ``U_1``
    is held at the identity and ``U_2 = exp(H_2)``, ``U_3 = exp(H_3)`` are
    searched with BFGS from seeded random anti-Hermitian starting points. The
    smooth surrogate ``1 - cos(Phi)`` is minimised. The result is an upper bound
    on the infimum; the nonnegative representative ``|Phi|`` is reported.
    """
    config = config or OptimizerConfig()
    states = (rho1, rho2, rho3)
    d = rho1.dim
    if any(r.dim != d for r in states):
        raise DimensionMismatch("all three density matrices must have the same dimension")
    for k, r in enumerate(states, start=1):
        _check_spectrum(r, k, 1e-12)
    roots = [matrix_sqrt_psd(r.matrix) for r in states]
    m12, m23, m31 = roots[0] @ roots[1], roots[1] @ roots[2], roots[2] @ roots[0]
    n = d * d

    def unitaries(x):
        return np.eye(d), expm(_antihermitian(x[: 2 * n], d)), expm(_antihermitian(x[2 * n:], d))

    def overlaps(x):
        u1, u2, u3 = unitaries(x)
        return (
            np.trace(m12 @ dagger(u2) @ u1),
            np.trace(m23 @ dagger(u3) @ u2),
            np.trace(m31 @ dagger(u1) @ u3),
        )

    def objective(x):
        o = overlaps(x)
        b = o[0] * o[1] * o[2]
        mag = abs(b)
        if mag <= config.overlap_tol ** 3:
            return 2.0
        return 1.0 - b.real / mag

    rng = np.random.default_rng(config.seed)
    best = None
    for _ in range(config.restarts):
        x0 = rng.normal(scale=1.0, size=4 * n)
        res = minimize(objective, x0, method="BFGS", options={"maxiter": config.max_iters, "gtol": config.tol})
        o = overlaps(res.x)
        if min(abs(v) for v in o) <= config.overlap_tol:
            continue
        if best is None or res.fun < best.fun:
            best = res
    if best is None:
        raise OptimizerFailed("no restart reached a point with all purified overlaps nonzero")
    o = overlaps(best.x)
    b = o[0] * o[1] * o[2]
    phi = abs(canonical_angle(cmath.phase(b)))
    return MixedPhaseResult(
        phase=phi,
        objective=abs(np.exp(1j * phi) - 1.0),
        restarts=config.restarts,
        unitaries=unitaries(best.x),
    )
