import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trifid.errors import DimensionMismatch, GenericityViolation, InconsistentData, InvalidState, ZeroFidelity
from trifid.reconstruction import (
    SequenceInvariants,
    canonical_gram,
    extract_invariants,
    gram_matrix,
    max_invariant_deviation,
    parameter_counts,
    reconstruct,
    verify_roundtrip,
)
from trifid.states import PureState, random_pure_vector, sample_rng

S = 1 / math.sqrt(2)
PI4 = [PureState([1, 0]), PureState([S, S]), PureState([S, 1j * S])]


def haar_sequence(n, dim, seed):
    rng = sample_rng(seed, n, dim)
    return [PureState(random_pure_vector(dim, rng)) for _ in range(n)]


def test_invariants_validation():
    with pytest.raises(InvalidState):
        SequenceInvariants(2, [[1, 0.2], [0.3, 1]], {})
    with pytest.raises(InvalidState):
        SequenceInvariants(2, [[0.9, 0.2], [0.2, 1]], {})
    with pytest.raises(InvalidState):
        SequenceInvariants(3, np.ones((3, 3)), {})
    with pytest.raises(InvalidState):
        SequenceInvariants(3, np.ones((3, 3)), {(1, 2): 0.0, (0, 2): 0.0})


def test_extract_examples():
    inv = extract_invariants([PureState([1, 0])])
    assert inv.n == 1 and inv.phases == {}
    inv = extract_invariants([PureState([1, 0]), PureState([0, 1])])
    assert inv.fidelities[0, 1] == 0.0 and inv.phases == {}
    inv = extract_invariants(PI4)
    assert np.allclose(inv.fidelities[np.triu_indices(3, 1)], 0.5)
    assert abs(inv.phases[(1, 2)] - math.pi / 4) <= 1e-12


def test_extract_names_offending_triple():
    states = [PureState([1, 0, 0]), PureState([0, 1, 0]), PureState([S, S, 0])]
    with pytest.raises(ZeroFidelity) as info:
        extract_invariants(states)
    assert info.value.triple == (1, 2, 3)


def test_reconstruct_examples():
    assert np.allclose(reconstruct(SequenceInvariants(1, [[1.0]], {})).coefficients, [[1.0]])
    c = reconstruct(SequenceInvariants(2, [[1, 0.25], [0.25, 1]], {})).coefficients
    assert np.allclose(c, [[1, 0], [0.5, math.sqrt(3) / 2]], atol=1e-15)
    seq = reconstruct(extract_invariants(PI4))
    assert np.max(np.abs(canonical_gram(seq.states()) - canonical_gram(PI4))) <= 1e-10


def test_gram_examples():
    v = PureState([S, 1j * S])
    assert np.allclose(gram_matrix([v, v, v]), np.ones((3, 3)))
    basis = [PureState(e) for e in np.eye(4)]
    assert np.allclose(gram_matrix(basis), np.eye(4))
    g = gram_matrix(PI4)
    assert abs(np.linalg.det(g)) <= 1e-12
    with pytest.raises(DimensionMismatch):
        gram_matrix([PureState([1, 0]), PureState([1, 0, 0])])


def test_inconsistent_triple_rejected():
    f = np.array([[1, 1, 1], [1, 1, 0], [1, 0, 1]], dtype=float)
    with pytest.raises(InconsistentData):
        reconstruct(SequenceInvariants(3, f, {(1, 2): 0.0}))


def test_inconsistent_phase_rejected():
    # fidelities admit real overlaps only; a phase of pi/2 makes the Gram matrix indefinite
    x = 0.9
    f = np.full((3, 3), x * x)
    np.fill_diagonal(f, 1.0)
    reconstruct(SequenceInvariants(3, f, {(1, 2): 0.0}))
    with pytest.raises(InconsistentData):
        reconstruct(SequenceInvariants(3, f, {(1, 2): math.pi / 2}))


def test_genericity_violation():
    f = np.array([[1, 0, 0.5], [0, 1, 0.5], [0.5, 0.5, 1]])
    with pytest.raises(GenericityViolation) as info:
        reconstruct(SequenceInvariants(3, f, {(1, 2): 0.0}))
    assert info.value.index is not None


def test_repeated_state_is_not_generic():
    # phi_2 = phi_1 gives c_22 = 0 and the division by it is undefined
    f = np.array([[1, 1, 0.5], [1, 1, 0.5], [0.5, 0.5, 1]])
    with pytest.raises(GenericityViolation):
        reconstruct(SequenceInvariants(3, f, {(1, 2): 0.0}))


@pytest.mark.parametrize("n", range(2, 9))
def test_roundtrip(n):
    for seed in range(60):
        for dim in (n, n + 2):
            rep = verify_roundtrip(haar_sequence(n, dim, seed))
            assert rep.gram_err <= 1e-8
            assert rep.max_fidelity_err <= 1e-8
            assert rep.max_phase_err <= 1e-8


def test_roundtrip_degenerate_lists():
    for states in ([PureState([1, 0, 0])], [PureState([1, 0]), PureState([0, 1])]):
        rep = verify_roundtrip(states)
        assert rep.to_dict() == {"max_fidelity_err": 0.0, "max_phase_err": 0.0, "gram_err": 0.0}


def test_canonical_rows():
    for seed in range(30):
        seq = reconstruct(extract_invariants(haar_sequence(6, 6, seed)))
        c = seq.coefficients
        assert np.all(np.abs(np.sum(np.abs(c) ** 2, axis=1) - 1) <= 1e-10)
        assert c[0, 0] == 1
        assert np.all(np.abs(c[:, 0].imag) == 0) and np.all(c[:, 0].real >= 0)
        assert np.all(np.diag(c).real >= 0) and np.allclose(np.diag(c).imag, 0)
        assert np.allclose(np.triu(c, 1), 0)


def test_gram_is_psd():
    for seed in range(200):
        g = gram_matrix(haar_sequence(5, 3, seed))
        assert np.min(np.linalg.eigvalsh(g)) >= -1e-9


def test_invariant_deviation():
    inv = extract_invariants(PI4)
    assert max_invariant_deviation(inv, extract_invariants(reconstruct(inv).states())) <= 1e-10


def test_parameter_counts():
    assert parameter_counts(1) == {"dof": 0, "fidelities": 0, "minimal_phases": 0, "all_phases": 0}
    c = parameter_counts(3)
    assert c["dof"] == 4 == c["fidelities"] + c["minimal_phases"]
    c = parameter_counts(10)
    assert (c["dof"], c["fidelities"], c["minimal_phases"], c["all_phases"]) == (81, 45, 36, 120)
    for n in range(1, 1001):
        c = parameter_counts(n)
        assert c["dof"] == c["fidelities"] + c["minimal_phases"]
    with pytest.raises(ValueError):
        parameter_counts(0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_roundtrip_property(n, seed):
    states = haar_sequence(n, n + 1, seed)
    seq = reconstruct(extract_invariants(states))
    assert np.max(np.abs(canonical_gram(seq.states()) - canonical_gram(states))) <= 1e-8
