"""Decide, certify and refute the Jensen square-root relation between PSD matrices."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    EigenvalueOnBoundary,
    GenerationExhausted,
    InvalidInterval,
    JensenOrderError,
    NonConvergence,
    NotHermitian,
    NotPositiveSemidefinite,
    PremiseViolated,
    SingularBlock,
    SpectrumOutOfWindow,
)
from .linalg import (
    EigenDecomposition,
    SpectralWindow,
    as_general,
    as_hermitian,
    eig_hermitian,
    operator_norm,
    polar,
    psd_sqrt,
    spectral_projection,
    svd,
)
from .order import (
    DecisionConfig,
    Outcome,
    Verdict,
    brute_force_order,
    certificate_value,
    check_order,
    check_order_squared,
    min_halfline,
)
from .witness import ContractionWitness, FactorizationData, find_contraction, solve_hermitian_quadratic, verify_witness
from .scalar import ScalarBoundParams, find_d, gap, k_function
from .replication import (
    PartitionReport,
    bound_decay_study,
    partition_pipeline,
    range_fixed_point_check,
    sandwich_check,
    schur_identity_check,
)
from .instances import (
    PaperExample,
    feasible_pair,
    paper_example,
    perturbation_margin,
    random_contraction,
    random_psd,
    z_pair,
)
