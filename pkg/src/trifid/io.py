"""JSON encodings for states, triples, witnesses and sequences.

Complex numbers are ``[re, im]`` pairs and matrices are row-major. Numbers
written by this module are rounded to 12 significant digits so that reports
diff cleanly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .reconstruction import CanonicalSequence, SequenceInvariants
from .states import BlochVector, DensityMatrix, ProbabilityMeasure, PureState
from .triples import ClassicalWitness, FidelityTriple


class FormatError(ValueError):
    """A JSON document does not match the expected schema."""

    def __init__(self, message: str, source: str | None = None, field: str | None = None):
        where = ", ".join(p for p in (f"file {source}" if source else None, f"field {field!r}" if field else None) if p)
        super().__init__(f"{where}: {message}" if where else message)
        self.source = source
        self.field = field


def num(x: float) -> float:
    """Round to 12 significant digits."""
    x = float(x)
    if x == 0.0 or not math.isfinite(x):
        return 0.0 if x == 0.0 else x
    return float(f"{x:.12g}")


def _pair(z: complex) -> list[float]:
    return [num(z.real), num(z.imag)]


def _complex(pair, field: str) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise FormatError("complex entries must be [re, im] pairs", field=field)
    return complex(float(pair[0]), float(pair[1]))


def _require(doc: dict, key: str):
    if not isinstance(doc, dict):
        raise FormatError("expected a JSON object")
    if key not in doc:
        raise FormatError("missing field", field=key)
    return doc[key]


# --- encoders ---------------------------------------------------------------

def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"dim": int(m.shape[0]), "entries": [_pair(z) for z in m.ravel()]}


def measure_to_json(mu: ProbabilityMeasure) -> dict:
    return {"weights": [num(w) for w in mu.weights]}


def pure_to_json(phi: PureState) -> dict:
    return {"amplitudes": [_pair(z) for z in phi.amplitudes]}


def density_to_json(rho: DensityMatrix) -> dict:
    return matrix_to_json(rho.matrix)


def bloch_to_json(v: BlochVector) -> dict:
    return {"x": num(v.x), "y": num(v.y), "z": num(v.z)}


def triple_to_json(f: FidelityTriple) -> dict:
    return {"f12": num(f.f12), "f13": num(f.f13), "f23": num(f.f23)}


def classical_witness_to_json(w: ClassicalWitness, verdict: str) -> dict:
    return {
        "space_size": w.space_size,
        "measures": [[num(x) for x in m.weights] for m in w.measures],
        "achieved": triple_to_json(w.achieved),
        "verdict": verdict,
    }


def quantum_witness_to_json(states, achieved: FidelityTriple, verdict: str) -> dict:
    return {
        "dim": states[0].dim,
        "states": [[_pair(z) for z in s.amplitudes] for s in states],
        "achieved": triple_to_json(achieved),
        "verdict": verdict,
    }


def invariants_to_json(inv: SequenceInvariants) -> dict:
    return {
        "n": inv.n,
        "fidelities": [[num(x) for x in row] for row in inv.fidelities],
        "phases": [
            {"k": k + 1, "j": j + 1, "value": num(v)} for (k, j), v in sorted(inv.phases.items(), key=lambda i: (i[0][1], i[0][0]))
        ],
    }


def sequence_to_json(seq: CanonicalSequence) -> dict:
    return {
        "n": seq.n,
        "rows": [[_pair(seq.coefficients[j, l]) for l in range(j + 1)] for j in range(seq.n)],
    }


# --- decoders ---------------------------------------------------------------

def matrix_from_json(doc: dict) -> np.ndarray:
    dim = _require(doc, "dim")
    entries = _require(doc, "entries")
    if not isinstance(dim, int) or dim < 1:
        raise FormatError("dim must be a positive integer", field="dim")
    if not isinstance(entries, list) or len(entries) != dim * dim:
        raise FormatError(f"expected {dim * dim} entries", field="entries")
    return np.array([_complex(e, "entries") for e in entries]).reshape(dim, dim)


def measure_from_json(doc: dict) -> ProbabilityMeasure:
    weights = _require(doc, "weights")
    try:
        return ProbabilityMeasure(np.array(weights, dtype=float))
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc), field="weights") from exc


def pure_from_json(doc: dict) -> PureState:
    amps = _require(doc, "amplitudes")
    if not isinstance(amps, list):
        raise FormatError("amplitudes must be a list", field="amplitudes")
    try:
        return PureState(np.array([_complex(a, "amplitudes") for a in amps]))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(str(exc), field="amplitudes") from exc


def density_from_json(doc: dict) -> DensityMatrix:
    m = matrix_from_json(doc)
    try:
        return DensityMatrix(m)
    except ValueError as exc:
        raise FormatError(str(exc), field="entries") from exc


def bloch_from_json(doc: dict) -> BlochVector:
    coords = []
    for key in ("x", "y", "z"):
        value = _require(doc, key)
        if not isinstance(value, (int, float)):
            raise FormatError("coordinate must be a number", field=key)
        coords.append(float(value))
    try:
        return BlochVector(*coords)
    except ValueError as exc:
        raise FormatError(str(exc), field="x") from exc


def triple_from_json(doc: dict) -> FidelityTriple:
    values = []
    for key in ("f12", "f13", "f23"):
        value = _require(doc, key)
        if not isinstance(value, (int, float)):
            raise FormatError("fidelity must be a number", field=key)
        values.append(float(value))
    try:
        return FidelityTriple(*values)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def invariants_from_json(doc: dict) -> SequenceInvariants:
    n = _require(doc, "n")
    if not isinstance(n, int) or n < 0:
        raise FormatError("n must be a nonnegative integer", field="n")
    fid = _require(doc, "fidelities")
    try:
        table = np.array(fid, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError("fidelities must be an n x n numeric table", field="fidelities") from exc
    if n and table.shape != (n, n):
        raise FormatError(f"fidelities must be {n} x {n}", field="fidelities")
    phases = {}
    for item in _require(doc, "phases"):
        try:
            k, j, value = int(item["k"]), int(item["j"]), float(item["value"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError("phase entries need integer k, j and numeric value", field="phases") from exc
        phases[(k - 1, j - 1)] = value
    try:
        return SequenceInvariants(n, table if n else np.zeros((0, 0)), phases)
    except ValueError as exc:
        raise FormatError(str(exc), field="phases") from exc


def sequence_from_json(doc: dict) -> CanonicalSequence:
    n = _require(doc, "n")
    rows = _require(doc, "rows")
    if not isinstance(rows, list) or len(rows) != n:
        raise FormatError(f"expected {n} rows", field="rows")
    c = np.zeros((n, n), dtype=np.complex128)
    for j, row in enumerate(rows):
        if len(row) != j + 1:
            raise FormatError(f"row {j + 1} must have {j + 1} entries", field="rows")
        c[j, : j + 1] = [_complex(z, "rows") for z in row]
    return CanonicalSequence(n, c)


READERS = {
    "classical": measure_from_json,
    "pure": pure_from_json,
    "mixed": density_from_json,
    "bloch": bloch_from_json,
}


def load_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise FormatError(f"cannot read: {exc.strerror}", source=str(path)) from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg} at line {exc.lineno}", source=str(path)) from exc


def read_state(path, kind: str):
    """Load one state file of the given kind, naming the file in any error."""
    doc = load_json(path)
    try:
        return READERS[kind](doc)
    except FormatError as exc:
        raise FormatError(str(exc).split(": ", 1)[-1] if exc.field else str(exc), source=str(path), field=exc.field) from exc
    except ValueError as exc:
        raise FormatError(str(exc), source=str(path)) from exc


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)
