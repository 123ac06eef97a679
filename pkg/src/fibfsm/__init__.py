"""Fibonacci Hamiltonian: exact words, block partitions, transfer certificates
and finite section diagnostics."""

from .jacobi import (
    CutoffSchedule,
    ExactlySingular,
    NearSingular,
    StabilityReport,
    TriSection,
    assemble,
    fsm_convergence,
    homogeneous_replay,
    inverse_norm,
    min_abs_eigenvalue,
    solve,
    stability_sweep,
    sturm_count,
)
from .subshift import (
    BlockParse,
    NotAFibonacciFactor,
    SubwordSet,
    central_motif_locate,
    enumerate_subwords,
    hull_sample,
    parse_left,
    parse_right,
    subword_complexity,
)
from .transfer import (
    CertificateViolation,
    GrowthCertificate,
    InsufficientWord,
    TransferMatrix,
    TransferVec,
    block_matrix,
    certify_one_sided,
    certify_two_sided,
    has_property_C,
    has_property_F,
    replay_paper_table,
    single_matrix,
    step_check_left,
    step_check_right,
    two_sided_seed,
)
from .words import PotentialWindow, finite_fibonacci, reverse, substitute, v_at, window

__version__ = "0.1.0"
