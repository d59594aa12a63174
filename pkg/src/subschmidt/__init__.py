"""Sub-Schmidt decompositions and SLOCC classification of tripartite pure
states whose third subsystem is a qubit."""

from .errors import (
    DEFAULT_TOL,
    CertificateError,
    DimensionalityError,
    NumericalError,
    QubitUnentangled,
    SingularPencilError,
    StateFormatError,
    SubSchmidtError,
    Tolerances,
    UnsupportedDimensionality,
)
from .tensor_state import (
    LocalSupport,
    RelativeDecomposition,
    TripartiteState,
    compress,
    dump_state,
    fidelity,
    group_subsystems,
    load_state,
    local_supports,
    reduced_density,
    relative_decomposition,
)
from .pencil import (
    JordanBlockTower,
    JordanFamilySignature,
    MoebiusParams,
    PencilAnalysis,
    ProjectiveEigenvalue,
    analyze,
    analyze_pencil,
    count_families,
    eigen_structure,
    enumerate_families,
    regularize,
    to_original_frame,
    transposed_analyze,
)
from .decompose import (
    PlaneState,
    ProductTerm,
    SubSchmidtDecomposition,
    degenerate_states,
    enumerate_decompositions,
    min_decomposition,
    reconstruct,
)
from .slocc import (
    EquivalenceDecision,
    Labelling,
    SloccCertificate,
    build_certificate,
    equivalent,
    signature_match,
    solve_moebius,
)
from . import catalog

__version__ = "0.1.0"
