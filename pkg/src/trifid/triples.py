"""Admissible fidelity triples and their classical / quantum witnesses.

A triple of fidelities ``(F12, F13, F23)`` is admissible when its square
roots ``x = (x1, x2, x3)`` lie in

    C3 = {x in [0, 1]^3 : x1^2 + x2^2 + x3^2 <= 1 + 2 x1 x2 x3}.

The same region comes out for probability measures, pure states and mixed
states, so every admissible triple has a witness in each class.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotAdmissible, OrderViolation, OutOfRange
from .fidelity import fidelity_classical, fidelity_pure
from .states import ProbabilityMeasure, PureState

DEFAULT_TOL = 1e-9
BISECTION_TOL = 1e-13

# pair index -> the two state labels it connects
PAIRS = ((0, 1), (0, 2), (1, 2))

CORNERS = (
    (0.0, 0.0, 0.0),
    (0.0, 0.0, 1.0),
    (0.0, 1.0, 0.0),
    (1.0, 0.0, 0.0),
    (1.0, 1.0, 1.0),
)


def _unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise OutOfRange(f"{name}={value} outside [0, 1]")
    return value


@dataclass(frozen=True)
class FidelityTriple:
    f12: float
    f13: float
    f23: float

    def __post_init__(self):
        for name in ("f12", "f13", "f23"):
            object.__setattr__(self, name, _unit_interval(name, getattr(self, name)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.f12, self.f13, self.f23)

    def sqrt(self) -> "SqrtTriple":
        return SqrtTriple(*(math.sqrt(f) for f in self.as_tuple()))


@dataclass(frozen=True)
class SqrtTriple:
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        for name in ("x1", "x2", "x3"):
            object.__setattr__(self, name, _unit_interval(name, getattr(self, name)))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x1, self.x2, self.x3)

    def squared(self) -> FidelityTriple:
        return FidelityTriple(*(x * x for x in self.as_tuple()))


class Verdict(str, enum.Enum):
    INSIDE = "Inside"
    BOUNDARY_SURFACE = "BoundarySurface"
    EXTREME_CORNER = "ExtremeCorner"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class TripleClassification:
    verdict: Verdict
    slack: float


@dataclass(frozen=True, eq=False)
class ClassicalWitness:
    measures: tuple[ProbabilityMeasure, ProbabilityMeasure, ProbabilityMeasure]
    achieved: FidelityTriple

    @property
    def space_size(self) -> int:
        return self.measures[0].size


def _slack(x1: float, x2: float, x3: float) -> float:
    return 1.0 + 2.0 * x1 * x2 * x3 - x1 * x1 - x2 * x2 - x3 * x3


def triple_slack(x: SqrtTriple) -> float:
    """``1 + 2 x1 x2 x3 - x1^2 - x2^2 - x3^2``; nonnegative exactly on C3."""
    return _slack(*x.as_tuple())


def fidelity_slack(f12: float, f13: float, f23: float) -> float:
    """The same slack written in fidelities, ``1 + 2 sqrt(F12 F13 F23) - sum F``."""
    return 1.0 + 2.0 * math.sqrt(max(0.0, f12 * f13 * f23)) - f12 - f13 - f23


def slack_batch(f12, f13, f23) -> np.ndarray:
    f12, f13, f23 = (np.asarray(f, dtype=float) for f in (f12, f13, f23))
    return 1.0 + 2.0 * np.sqrt(np.clip(f12 * f13 * f23, 0.0, None)) - f12 - f13 - f23


def classify_triple(f: FidelityTriple, tol: float = DEFAULT_TOL) -> TripleClassification:
    x = f.sqrt().as_tuple()
    slack = _slack(*x)
    if slack < -tol:
        verdict = Verdict.OUTSIDE
    elif any(max(abs(a - b) for a, b in zip(x, c)) <= tol for c in CORNERS):
        verdict = Verdict.EXTREME_CORNER
    elif abs(slack) <= tol and all(c < 1.0 - tol for c in x):
        verdict = Verdict.BOUNDARY_SURFACE
    else:
        verdict = Verdict.INSIDE
    return TripleClassification(verdict, slack)


def boundary_x3(x1: float, x2: float) -> float:
    """Larger root ``x3`` of ``x1^2 + x2^2 + x3^2 = 1 + 2 x1 x2 x3``.

    Requires ``0 <= x1 <= x2 <= 1``.
    """
    x1 = _unit_interval("x1", x1)
    x2 = _unit_interval("x2", x2)
    if x1 > x2:
        raise OrderViolation(f"boundary_x3 needs x1 <= x2, got {x1} > {x2}")
    return _surface_root(x1, x2)


def _surface_root(a: float, b: float) -> float:
    return min(1.0, a * b + math.sqrt(max(0.0, (1.0 - a * a) * (1.0 - b * b))))


# --- classical witnesses ----------------------------------------------------
#
# A witness is kept as a list of (weight, [three weight vectors]) pieces; the
# weighted direct sum of the pieces has affinities equal to the weighted sum
# of the pieces' affinities.

def _surface_piece(x: tuple[float, float, float]) -> list[list[float]]:
    """Two-point witness for a point whose pair overlaps satisfy the surface equation.

    The two smallest coordinates share a state ``c``; it gets the point mass
    and the other two states get ``(a^2, 1 - a^2)`` and ``(b^2, 1 - b^2)``.
    Their mutual affinity is then ``a b + sqrt((1-a^2)(1-b^2))``.
    """
    order = sorted(range(3), key=lambda k: x[k])
    pa, pb = order[0], order[1]
    a, b = x[pa], x[pb]
    (common,) = set(PAIRS[pa]) & set(PAIRS[pb])
    other_a = PAIRS[pa][0] if PAIRS[pa][1] == common else PAIRS[pa][1]
    other_b = PAIRS[pb][0] if PAIRS[pb][1] == common else PAIRS[pb][1]
    vectors: list[list[float]] = [[], [], []]
    vectors[common] = [1.0, 0.0]
    vectors[other_a] = [a * a, 1.0 - a * a]
    vectors[other_b] = [b * b, 1.0 - b * b]
    return vectors


def _corner_piece(x: tuple[float, float, float]) -> list[list[float]]:
    if x == (1.0, 1.0, 1.0):
        return [[1.0], [1.0], [1.0]]
    if x == (0.0, 0.0, 0.0):
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    # exactly one pair coincides, the third state sits on the other point
    k = x.index(1.0)
    i, j = PAIRS[k]
    vectors = [[0.0, 1.0] for _ in range(3)]
    vectors[i] = [1.0, 0.0]
    vectors[j] = [1.0, 0.0]
    return vectors


def _edge_piece(x: tuple[float, float, float]) -> list[list[float]]:
    """Witness for ``(1, a, a)`` and its relabelings: two states coincide."""
    k = max(range(3), key=lambda i: x[i])
    i, j = PAIRS[k]
    (w,) = {0, 1, 2} - {i, j}
    a = x[(k + 1) % 3]
    vectors: list[list[float]] = [[], [], []]
    vectors[i] = [a * a, 1.0 - a * a]
    vectors[j] = [a * a, 1.0 - a * a]
    vectors[w] = [1.0, 0.0]
    return vectors


def _ray_exit(x: tuple[float, float, float]) -> tuple[float, bool]:
    """Largest ``s`` with ``1 + s (x - 1)`` still in C3.

    Returns ``(s, on_face)`` where ``on_face`` means the ray leaves the cube
    through a coordinate face before reaching the curved surface.
    """
    d = [c - 1.0 for c in x]
    s_face = min(-1.0 / dj for dj in d if dj < 0.0)

    def point(s):
        return [max(0.0, 1.0 + s * dj) for dj in d]

    if _slack(*point(s_face)) >= 0.0:
        return s_face, True
    lo, hi = 1.0, s_face
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if _slack(*point(mid)) >= 0.0:
            lo = mid
        else:
            hi = mid
    return lo, False


def _pieces(x: tuple[float, float, float]) -> list[tuple[float, list[list[float]]]]:
    if x in CORNERS:
        return [(1.0, _corner_piece(x))]
    if max(x) >= 1.0 - 1e-15:
        return [(1.0, _edge_piece(x))]
    slack = _slack(*x)
    if slack <= 0.0:
        # on (or round-off outside) the curved surface
        return [(1.0, _surface_piece(x))]
    s, on_face = _ray_exit(x)
    t = 1.0 / s
    p = tuple(max(0.0, 1.0 + s * (c - 1.0)) for c in x)
    pieces = []
    if on_face:
        k = min(range(3), key=lambda i: p[i])
        others = [i for i in range(3) if i != k]
        r = math.hypot(p[others[0]], p[others[1]])
        if r > 0.0:
            q = [0.0, 0.0, 0.0]
            q[others[0]] = p[others[0]] / r
            q[others[1]] = p[others[1]] / r
            pieces.append((t * r, _surface_piece(tuple(q))))
        pieces.append((t * (1.0 - r), _corner_piece((0.0, 0.0, 0.0))))
    else:
        pieces.append((t, _surface_piece(p)))
    pieces.append((1.0 - t, _corner_piece((1.0, 1.0, 1.0))))
    return [(w, vec) for w, vec in pieces if w > 0.0]


def _assemble(pieces) -> tuple[ProbabilityMeasure, ProbabilityMeasure, ProbabilityMeasure]:
    rows: list[list[float]] = [[], [], []]
    for weight, vectors in pieces:
        for k in range(3):
            rows[k].extend(weight * v for v in vectors[k])
    rows = [np.array(r) for r in rows]
    # drop points that carry no mass in any of the three measures
    keep = np.any(np.stack(rows) > 0.0, axis=0)
    return tuple(_measure(r[keep]) for r in rows)


def _measure(w: np.ndarray) -> ProbabilityMeasure:
    w = np.clip(w, 0.0, None)
    return ProbabilityMeasure(w / w.sum())


def classical_witness(f: FidelityTriple, tol: float = DEFAULT_TOL) -> ClassicalWitness:
    """Three probability measures on at most six points realising ``f``.

    Corners use the degenerate constructions (one, two or three points);
    points on the curved surface use the two-point construction. Any other
    admissible point is written as a convex combination of ``(1, 1, 1)`` and
    the point where the ray from ``(1, 1, 1)`` through it leaves C3, and the
    witness is the matching weighted direct sum.
    """
    if classify_triple(f, tol).verdict is Verdict.OUTSIDE:
        raise NotAdmissible(f"triple {f.as_tuple()} lies outside C3")
    measures = _assemble(_pieces(f.sqrt().as_tuple()))
    achieved = FidelityTriple(*(fidelity_classical(measures[i], measures[j]) for i, j in PAIRS))
    return ClassicalWitness(measures, achieved)


def quantum_witness(f: FidelityTriple, tol: float = DEFAULT_TOL) -> tuple[PureState, PureState, PureState]:
    """Three pure states in dimension at most three realising ``f``.

    States are labelled so that the pair with the smallest overlap ``x`` is
    ``(a, b)``; then ``phi_a = e1``, ``phi_b = x e1 + sqrt(1 - x^2) e2`` and the
    third state is ``y e1 + beta e2 + gamma e3``, with ``beta`` fixed by its
    overlap with ``phi_b`` and ``gamma`` by normalisation. All overlaps are
    real and nonnegative except possibly ``beta``.
    """
    if classify_triple(f, tol).verdict is Verdict.OUTSIDE:
        raise NotAdmissible(f"triple {f.as_tuple()} lies outside C3")
    x = f.sqrt().as_tuple()
    k = min(range(3), key=lambda i: x[i])
    a, b = PAIRS[k]
    (w,) = {0, 1, 2} - {a, b}
    xab = x[k]
    xaw = x[PAIRS.index(tuple(sorted((a, w))))]
    xbw = x[PAIRS.index(tuple(sorted((b, w))))]
    vecs = [None, None, None]
    vecs[a] = np.array([1.0, 0.0, 0.0])
    spread = math.sqrt(max(0.0, 1.0 - xab * xab))
    vecs[b] = np.array([xab, spread, 0.0])
    if spread > 0.0:
        beta = (xbw - xab * xaw) / spread
    else:
        # phi_b = phi_a, so admissibility already forces xbw == xaw
        beta = math.sqrt(max(0.0, 1.0 - xaw * xaw))
    gamma = math.sqrt(max(0.0, 1.0 - xaw * xaw - beta * beta))
    vecs[w] = np.array([xaw, beta, gamma])
    states = tuple(PureState.normalized(v) for v in vecs)
    return states


def quantum_witness_fidelities(states) -> FidelityTriple:
    return FidelityTriple(*(fidelity_pure(states[i], states[j]) for i, j in PAIRS))


def lemma3_closed_form(overlap_t: float, a: float) -> float:
    """``sup_h |<f,h>|^2 + |<g,h>|^2 - 2a |<f,h>||<g,h>|`` over unit ``h``.

    The supremum is ``(1 - a)(1 + t)`` for ``t = |<f,g>| <= a <= 1``, and
    never exceeds ``1 - a^2``.
    """
    t = _unit_interval("t", overlap_t)
    a = _unit_interval("a", a)
    if t > a:
        raise OrderViolation(f"need |<f,g>| <= a, got t={t} > a={a}")
    return (1.0 - a) * (1.0 + t)


def lemma3_numeric_oracle(f: PureState, g: PureState, a: float, grid: int = 1000, refinements: int = 4) -> float:
    """Brute-force ``sup_h |<f,h>|^2 + |<g,h>|^2 - 2a |<f,h>||<g,h>|`` over unit ``h``.

    Only ``h`` in ``span{f, g}`` matter. They are swept as
    ``h = cos(chi) f + e^{i omega} sin(chi) u`` with ``u`` the unit vector
    orthogonal to ``f`` in the span, on a ``grid x grid`` mesh of
    ``(chi, omega) in [0, pi/2] x [0, 2 pi]``. The mesh is then re-centred and
    shrunk around the best point ``refinements`` times. The global phase of
    ``h`` drops out, so every normalised ``h = alpha f + beta g`` is covered.
    """
    fv, gv = f.amplitudes, g.amplitudes
    if fv.shape != gv.shape:
        raise OrderViolation("f and g live in different dimensions")
    overlap = complex(np.vdot(fv, gv))
    t = min(1.0, abs(overlap))
    a = _unit_interval("a", a)
    if t > a + 1e-15:
        raise OrderViolation(f"need |<f,g>| <= a, got t={t} > a={a}")
    residual = gv - overlap * fv
    rnorm = float(np.linalg.norm(residual))
    if rnorm <= 1e-12:
        # g is a multiple of f, so the span is the single ray through f
        return (1.0 + t * t) - 2.0 * a * t
    u = residual / rnorm
    gf, gu = np.vdot(gv, fv), np.vdot(gv, u)

    def values(chi, omega):
        c = np.cos(chi)
        s = np.sin(chi) * np.exp(1j * omega)
        fh = np.abs(c + 0j)
        gh = np.abs(c * gf + s * gu)
        return fh * fh + gh * gh - 2.0 * a * fh * gh

    lo_c, hi_c, lo_w, hi_w = 0.0, 0.5 * math.pi, 0.0, 2.0 * math.pi
    best_val, best = -np.inf, (0.0, 0.0)
    for _ in range(refinements + 1):
        chi = np.linspace(lo_c, hi_c, grid + 1)
        omega = np.linspace(lo_w, hi_w, grid + 1)
        vals = values(chi[:, None], omega[None, :])
        i, j = np.unravel_index(np.argmax(vals), vals.shape)
        if vals[i, j] > best_val:
            best_val, best = float(vals[i, j]), (chi[i], omega[j])
        hc = 4.0 * (hi_c - lo_c) / grid
        hw = 4.0 * (hi_w - lo_w) / grid
        lo_c, hi_c = max(0.0, best[0] - hc), min(0.5 * math.pi, best[0] + hc)
        lo_w, hi_w = best[1] - hw, best[1] + hw
    return best_val


def random_admissible_sqrt(rng: np.random.Generator, kind: str) -> tuple[float, float, float]:
    """Draw a point of C3 of the requested ``kind``: boundary, corner or interior."""
    if kind == "corner":
        return CORNERS[rng.integers(len(CORNERS))]
    if kind == "boundary":
        a, b = sorted(rng.random(2))
        c = _surface_root(a, b)
        pts = [a, b, c]
        rng.shuffle(pts)
        return tuple(pts)
    if kind == "interior":
        while True:
            x = tuple(rng.random(3))
            if _slack(*x) > 0.0:
                return x
    if kind == "edge":
        a = rng.random()
        pts = [1.0, a, a]
        rng.shuffle(pts)
        return tuple(pts)
    raise ValueError(f"unknown kind {kind!r}")


__all__ = [
    "CORNERS",
    "ClassicalWitness",
    "FidelityTriple",
    "SqrtTriple",
    "TripleClassification",
    "Verdict",
    "boundary_x3",
    "classical_witness",
    "classify_triple",
    "fidelity_slack",
    "lemma3_closed_form",
    "lemma3_numeric_oracle",
    "quantum_witness",
    "quantum_witness_fidelities",
    "random_admissible_sqrt",
    "slack_batch",
    "triple_slack",
]
