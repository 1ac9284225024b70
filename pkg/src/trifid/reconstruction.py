"""Rebuilding a sequence of pure states from fidelities and phases.

Given ``F_jk`` for all pairs and the phases ``Phi_1kj`` for ``1 < k < j``, the
states are recovered as rows of a lower-triangular coefficient matrix

    phi_j = sum_{l <= j} c_jl e_l,    c_j1 >= 0,  c_jj >= 0,

with the overlaps ``<phi_k, phi_j>`` read off the phase relation and the
coefficients obtained by forward substitution. Indices in this module are
0-based; the phase table is keyed by ``(k, j)`` with ``0 < k < j``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, GenericityViolation, InconsistentData, InvalidState, ZeroFidelity
from .phase import ZERO_FIDELITY_TOL, canonical_angle
from .states import PureState

GENERICITY_TOL = 1e-10
RADICAND_TOL = 1e-8
TABLE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SequenceInvariants:
    """Pairwise fidelities plus the minimal phase table ``{(k, j): Phi_1kj}``."""

    n: int
    fidelities: np.ndarray
    phases: dict

    def __post_init__(self):
        n = int(self.n)
        f = np.array(self.fidelities, dtype=float).reshape(n, n) if n else np.zeros((0, 0))
        if n < 0:
            raise InvalidState("sequence length must be nonnegative")
        if np.any(np.abs(np.diag(f) - 1.0) > TABLE_TOL):
            raise InvalidState("fidelity table must have unit diagonal")
        if np.any(np.abs(f - f.T) > TABLE_TOL):
            raise InvalidState("fidelity table must be symmetric")
        if np.any(f < -TABLE_TOL) or np.any(f > 1.0 + TABLE_TOL):
            raise InvalidState("fidelities must lie in [0, 1]")
        f = np.clip(0.5 * (f + f.T), 0.0, 1.0)
        np.fill_diagonal(f, 1.0)
        required = {(k, j) for j in range(n) for k in range(1, j)}
        phases = {}
        for key, value in dict(self.phases).items():
            key = (int(key[0]), int(key[1]))
            if key not in required:
                raise InvalidState(f"phase index {key} outside the minimal set 0 < k < j < n")
            phases[key] = canonical_angle(float(value))
        missing = required - set(phases)
        if missing:
            raise InvalidState(f"missing phases for {sorted(missing)}")
        f.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "fidelities", f)
        object.__setattr__(self, "phases", phases)


@dataclass(frozen=True, eq=False)
class CanonicalSequence:
    n: int
    coefficients: np.ndarray

    def states(self) -> list[PureState]:
        return [PureState.normalized(self.coefficients[j]) for j in range(self.n)]

    def gram(self) -> np.ndarray:
        c = self.coefficients
        return np.conj(c) @ c.T


@dataclass(frozen=True)
class RoundtripReport:
    max_fidelity_err: float
    max_phase_err: float
    gram_err: float

    def to_dict(self) -> dict:
        return {
            "max_fidelity_err": self.max_fidelity_err,
            "max_phase_err": self.max_phase_err,
            "gram_err": self.gram_err,
        }


def _vectors(states) -> np.ndarray:
    if not states:
        return np.zeros((0, 0), dtype=np.complex128)
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise DimensionMismatch(f"states have dimensions {sorted(dims)}")
    return np.stack([s.amplitudes for s in states])


def gram_matrix(states) -> np.ndarray:
    """``G[j, k] = <phi_j, phi_k>``."""
    v = _vectors(states)
    return np.conj(v) @ v.T


def extract_invariants(states) -> SequenceInvariants:
    """Fidelities and the minimal phases ``Phi(1, k, j)`` of a sequence."""
    g = gram_matrix(states)
    n = g.shape[0]
    fid = np.abs(g) ** 2
    phases = {}
    for j in range(n):
        for k in range(1, j):
            for a, b in ((0, k), (k, j), (0, j)):
                if fid[a, b] <= ZERO_FIDELITY_TOL:
                    raise ZeroFidelity(
                        f"phase of triple (1, {k + 1}, {j + 1}) is undefined: "
                        f"F[{a + 1},{b + 1}] = {fid[a, b]:.3e}",
                        triple=(1, k + 1, j + 1),
                    )
            phases[(k, j)] = cmath.phase(g[0, k] * g[k, j] * g[j, 0])
    return SequenceInvariants(n, fid, phases)


def _check_triples(inv: SequenceInvariants) -> None:
    f = inv.fidelities
    x = np.sqrt(f)
    for j in range(inv.n):
        for k in range(1, j):
            a, b, c = x[0, k], x[0, j], x[k, j]
            slack = 1.0 + 2.0 * a * b * c - a * a - b * b - c * c
            if slack < -RADICAND_TOL:
                raise InconsistentData(
                    f"fidelities of states (1, {k + 1}, {j + 1}) violate the triple inequality "
                    f"(slack {slack:.3e})",
                    index=j,
                )


def reconstruct(inv: SequenceInvariants, tol: float = GENERICITY_TOL) -> CanonicalSequence:
    """Canonical coefficients ``c_jl`` of the sequence with the given invariants.

    A state whose fidelity with every predecessor is at most ``tol`` is
    placed on a fresh basis vector, which the data determines exactly; it
    must then also be orthogonal to every later state.

    Raises:
        InconsistentData: if no sequence of pure states has these invariants.
        GenericityViolation: if some ``F_1j`` or some ``c_kk`` is at most ``tol``,
            which makes the data insufficient to pin down the sequence.
    """
    n = inv.n
    c = np.zeros((n, n), dtype=np.complex128)
    if n == 0:
        return CanonicalSequence(0, c)
    _check_triples(inv)
    f = inv.fidelities
    c[0, 0] = 1.0
    # states orthogonal to every predecessor; their phase is not tied to phi_1
    free = set()
    for j in range(1, n):
        if f[0, j] <= tol:
            if all(f[k, j] <= tol for k in range(j)):
                c[j, j] = 1.0
                free.add(j)
                continue
            raise GenericityViolation(f"F[1,{j + 1}] = {f[0, j]:.3e} vanishes", index=j)
        c[j, 0] = math.sqrt(f[0, j])
        for k in range(1, j):
            if k in free:
                if f[k, j] > tol:
                    raise GenericityViolation(
                        f"F[1,{k + 1}] vanishes, so <phi_{k + 1}, phi_{j + 1}> has no recoverable phase",
                        index=k,
                    )
                continue
            # <phi_k, phi_j> = e^{i Phi_1kj} sqrt(F_1k F_kj F_1j) / (c_k1 c_j1)
            overlap = cmath.exp(1j * inv.phases[(k, j)]) * math.sqrt(f[k, j])
            partial = np.vdot(c[k, :k], c[j, :k])
            if c[k, k].real <= tol:
                if abs(overlap - partial) > math.sqrt(RADICAND_TOL):
                    raise InconsistentData(
                        f"state {k + 1} lies in the span of its predecessors but "
                        f"<phi_{k + 1}, phi_{j + 1}> disagrees with it",
                        index=j,
                    )
                raise GenericityViolation(f"c[{k + 1},{k + 1}] = {c[k, k].real:.3e} vanishes", index=k)
            c[j, k] = (overlap - partial) / c[k, k].real
        radicand = 1.0 - float(np.sum(np.abs(c[j, :j]) ** 2))
        if radicand < -RADICAND_TOL:
            raise InconsistentData(
                f"row {j + 1} has squared norm {1.0 - radicand:.12g} > 1; no pure-state sequence fits",
                index=j,
            )
        c[j, j] = math.sqrt(max(0.0, radicand))
    return CanonicalSequence(n, c)


def _align(g: np.ndarray) -> np.ndarray:
    """Rephase states so that ``<phi_1, phi_j>`` is real and nonnegative."""
    if g.size == 0:
        return g
    d = np.ones(g.shape[0], dtype=np.complex128)
    for j in range(g.shape[0]):
        z = g[0, j]
        if abs(z) > 0:
            d[j] = np.conj(z) / abs(z)
    # state j -> d_j phi_j changes G[k, j] to conj(d_k) d_j G[k, j]
    return np.conj(d)[:, None] * g * d[None, :]


def canonical_gram(states) -> np.ndarray:
    return _align(gram_matrix(states))


def verify_roundtrip(states) -> RoundtripReport:
    """Extract invariants, reconstruct, and compare against the original sequence."""
    inv = extract_invariants(states)
    seq = reconstruct(inv)
    if inv.n == 0:
        return RoundtripReport(0.0, 0.0, 0.0)
    rebuilt = extract_invariants(seq.states())
    fid_err = float(np.max(np.abs(rebuilt.fidelities - inv.fidelities)))
    phase_err = max(
        (abs(canonical_angle(rebuilt.phases[key] - value)) for key, value in inv.phases.items()),
        default=0.0,
    )
    g_orig = canonical_gram(states)
    g_rec = _align(seq.gram())
    gram_err = float(np.max(np.abs(g_orig - g_rec)))
    gram_err = max(gram_err, float(np.max(np.abs(np.abs(g_orig) - np.abs(g_rec)))))
    return RoundtripReport(fid_err, float(phase_err), gram_err)


def max_invariant_deviation(a: SequenceInvariants, b: SequenceInvariants) -> float:
    if a.n != b.n:
        return math.inf
    dev = float(np.max(np.abs(a.fidelities - b.fidelities))) if a.n else 0.0
    for key, value in a.phases.items():
        fk = min(a.fidelities[0, key[0]], a.fidelities[key[0], key[1]], a.fidelities[0, key[1]])
        if fk > ZERO_FIDELITY_TOL:
            dev = max(dev, abs(canonical_angle(b.phases[key] - value)))
    return dev


def parameter_counts(n: int) -> dict:
    """Real parameter counts for a length-``n`` sequence modulo isometries."""
    if n < 1:
        raise ValueError("sequence length must be at least 1")
    return {
        "dof": (n - 1) ** 2,
        "fidelities": n * (n - 1) // 2,
        "minimal_phases": (n - 1) * (n - 2) // 2,
        "all_phases": n * (n - 1) * (n - 2) // 6,
    }

