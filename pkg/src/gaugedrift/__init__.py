"""Desk-scale state-vector simulator for finite-group lattice gauge theories.

The package models coherent gauge-drift errors on small lattices, the
suppression of that drift by interleaved random gauge transformations, and a
measurement-based (Zeno) variant using an ancilla-controlled transformation.
"""

from .drift import (
    BlockDecomposition,
    DriftSpec,
    block_decompose,
    first_appearance_expansion,
    random_drift,
    z2_rotation_drift,
)
from .engine import (
    EnsembleStats,
    ExperimentConfig,
    GrowthFit,
    GrowthFitError,
    TrajectoryRecord,
    ZenoResult,
    ZeroNormBranchError,
    fit_growth,
    run_ensemble,
    run_trajectory,
    zeno_step,
)
from .groups import (
    FiniteGroup,
    WordSampler,
    element_order,
    group_from_name,
    make_cyclic,
    make_dihedral,
    sample_uniform,
    sample_word,
    total_variation,
    word_distribution,
)
from .lattice import (
    GaugeProjector,
    LatticeModel,
    basis_index,
    build_projector,
    config_of,
    gauge_operator,
    gauge_permutation,
    lattice_from_links,
    physical_basis,
    two_link_plaquette,
    unphysical_weight,
    z2_two_link_hamiltonian,
)
from .linalg import apply, expm_i_hermitian, hermitian_eig, overlap

__version__ = "0.1.0"
