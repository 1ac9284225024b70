"""Fidelity triples, three-state phases and pure-state sequence reconstruction."""

from .errors import *  # noqa: F401,F403
from .fidelity import (
    affinity,
    fidelity_bloch2d,
    fidelity_classical,
    fidelity_pure,
    fidelity_uhlmann,
    fidelity_uhlmann_batch,
    hellinger_sq,
)
from .linalg import hermitian_eig, matrix_sqrt_psd, operator_abs, polar_unitary, random_unitary
from .phase import (
    OptimizerConfig,
    PhaseValue,
    bargmann_product,
    collinearity_test,
    phase_bloch_cos,
    phase_mixed_variational,
    phase_pure,
)
from .reconstruction import (
    CanonicalSequence,
    SequenceInvariants,
    extract_invariants,
    parameter_counts,
    reconstruct,
    verify_roundtrip,
)
from .states import (
    BlochVector,
    DensityMatrix,
    ProbabilityMeasure,
    PureState,
    bloch_to_density,
    density_to_bloch,
    purify,
    random_density,
    random_pure,
)
from .triples import (
    FidelityTriple,
    SqrtTriple,
    Verdict,
    boundary_x3,
    classical_witness,
    classify_triple,
    quantum_witness,
    triple_slack,
)

__version__ = "0.1.0"
