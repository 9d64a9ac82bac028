"""Statevector pipelines that treat a unitary's eigenvalues as addresses.

The package simulates named-register statevectors, codes circuits as dense
integers, reveals eigenvalue frequencies into ancilla registers and restores
the ancillas afterwards, and builds on those pieces: amplified search with
random stopping times, degeneracy counting, spectrum estimation with
thermodynamic read-outs, structure search over circuit codes, and black-box
device comparison under a distinguishability promise.
"""
from .amplify import (
    BasisReflection,
    SubspaceReflection,
    VectorReflection,
    count_rotation_time,
    default_bound,
    grover_rotate,
    majority_search,
    random_time_search,
    success_after,
)
from .circuit import (
    CircuitCode,
    GateSet,
    app,
    build_unitary,
    circuit_from_json,
    circuit_to_json,
    code_space_size,
    decode,
    encode,
    u_seq,
)
from .distinguish import (
    BlackBoxUnitary,
    DistinguishParams,
    check_roundtrip,
    difference,
    recognize_device,
)
from .phase import (
    FrequencyTable,
    build_frequency_table,
    qft_matrix,
    rest,
    rev,
    rev_inverse,
    reveal_amplitudes,
    reveal_distribution,
    turning,
    verify_w_type,
    window_mass,
)
from .recognize import RecognitionQuery, recognize_eigenvalue
from .report import ExperimentConfig, QueryCounter, RunReport
from .rng import child_seed, stream
from .spectral import (
    SparsityProfile,
    SpectralDecomposition,
    SubspaceDistances,
    decompose,
    group_basis,
    group_projector,
    is_d_distinguishable,
    subspace_distances,
)
from .statevec import (
    DenseUnitary,
    RegisterLayout,
    StateVector,
    apply,
    apply_controlled,
    apply_diagonal,
    apply_if_ge,
    apply_on_qubits,
    distribution,
    format_state,
    measure,
    parse_state,
)
from .structure import SpectrumSpec, find_structure, spectrum_matches
from .thermo import (
    count_level_degeneracy,
    find_anchor_frequencies,
    load_hamiltonian,
    rescale,
    run_thermo,
    thermo_functions,
)

__version__ = "0.1.0"

__all__ = [
    "BasisReflection",
    "BlackBoxUnitary",
    "CircuitCode",
    "DenseUnitary",
    "DistinguishParams",
    "ExperimentConfig",
    "FrequencyTable",
    "GateSet",
    "QueryCounter",
    "RecognitionQuery",
    "RegisterLayout",
    "RunReport",
    "SparsityProfile",
    "SpectralDecomposition",
    "SpectrumSpec",
    "StateVector",
    "SubspaceDistances",
    "SubspaceReflection",
    "VectorReflection",
    "app",
    "apply",
    "apply_controlled",
    "apply_diagonal",
    "apply_if_ge",
    "apply_on_qubits",
    "build_frequency_table",
    "build_unitary",
    "check_roundtrip",
    "child_seed",
    "circuit_from_json",
    "circuit_to_json",
    "code_space_size",
    "count_level_degeneracy",
    "count_rotation_time",
    "decode",
    "decompose",
    "default_bound",
    "difference",
    "distribution",
    "encode",
    "find_anchor_frequencies",
    "find_structure",
    "format_state",
    "group_basis",
    "group_projector",
    "grover_rotate",
    "is_d_distinguishable",
    "load_hamiltonian",
    "majority_search",
    "measure",
    "parse_state",
    "qft_matrix",
    "random_time_search",
    "recognize_device",
    "recognize_eigenvalue",
    "rescale",
    "rest",
    "rev",
    "rev_inverse",
    "reveal_amplitudes",
    "reveal_distribution",
    "run_thermo",
    "spectrum_matches",
    "stream",
    "subspace_distances",
    "success_after",
    "thermo_functions",
    "turning",
    "u_seq",
    "verify_w_type",
    "window_mass",
]
