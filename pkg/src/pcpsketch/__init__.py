"""Projection-cost-preserving sketches with checkable guarantees.

A sketch here is a skinny stand-in for a wide matrix: Ã = AS (plus a
fixed scalar c) such that every rank-at-most-k projection sees nearly
the same residual cost on Ã as on A.  The package builds such sketches
several ways, certifies them through two sufficient conditions, audits
them empirically against adversarial probe projections, and transfers
approximate solutions found on the sketch back to the original matrix.
"""

from .audit import (
    ImplicationResult,
    PcpReport,
    ProbeResult,
    ProbeSet,
    TransferCheck,
    approx_transfer_check,
    generate_probes,
    implication_harness,
    implication_test,
    pcp_report,
)
from .errors import (
    ConfigError,
    DimensionError,
    Error,
    InvalidInputError,
    InvalidMatrixError,
    InvalidOverestimateError,
    InvalidRankError,
    TooLargeError,
    UnsupportedFamilyError,
    WidthNotReducingWarning,
    ZeroMatrixError,
)
from .generators import GeneratorSpec, gen_synthetic, parse_generator_spec
from .guarantees import (
    Certificate,
    JlMomentEstimate,
    amm_error,
    certify_matrix_approx,
    certify_spectral,
    frobenius_preservation_error,
    jl_moment_estimate,
    spectral_approx_error,
    subspace_embedding_error,
)
from .linalg import (
    Projection,
    frob2,
    haar_subspace,
    head_tail_split,
    projection_cost,
    svd,
    tail_index_p,
)
from .matio import load_matrix, save_matrix
from .rng import Stream, derive_seed, rng_for
from .sketch import (
    METHODS,
    Sketch,
    SketchParams,
    gaussian_sketch,
    gaussian_width,
    leverage_residual_sample,
    make_sketch,
    non_oblivious_rp,
    orthogonal_sketch,
    ridge_leverage_sample,
    ridge_scores,
    svd_sketch,
    with_seed,
)
from .solvers import (
    Clustering,
    SolveResult,
    best_rank_k_projection,
    cluster_indicator_projection,
    exhaustive_kmeans,
    kmeans_cost,
    lloyd_kmeans,
    partitions,
    sketch_and_solve,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "Clustering",
    "ConfigError",
    "DimensionError",
    "Error",
    "GeneratorSpec",
    "ImplicationResult",
    "InvalidInputError",
    "InvalidMatrixError",
    "InvalidOverestimateError",
    "InvalidRankError",
    "JlMomentEstimate",
    "METHODS",
    "PcpReport",
    "ProbeResult",
    "ProbeSet",
    "Projection",
    "Sketch",
    "SketchParams",
    "SolveResult",
    "Stream",
    "TooLargeError",
    "TransferCheck",
    "UnsupportedFamilyError",
    "WidthNotReducingWarning",
    "ZeroMatrixError",
    "amm_error",
    "approx_transfer_check",
    "best_rank_k_projection",
    "certify_matrix_approx",
    "certify_spectral",
    "cluster_indicator_projection",
    "derive_seed",
    "exhaustive_kmeans",
    "frob2",
    "frobenius_preservation_error",
    "gaussian_sketch",
    "gaussian_width",
    "gen_synthetic",
    "generate_probes",
    "haar_subspace",
    "head_tail_split",
    "implication_harness",
    "implication_test",
    "jl_moment_estimate",
    "kmeans_cost",
    "leverage_residual_sample",
    "lloyd_kmeans",
    "load_matrix",
    "make_sketch",
    "non_oblivious_rp",
    "orthogonal_sketch",
    "parse_generator_spec",
    "partitions",
    "pcp_report",
    "projection_cost",
    "ridge_leverage_sample",
    "ridge_scores",
    "rng_for",
    "save_matrix",
    "sketch_and_solve",
    "spectral_approx_error",
    "subspace_embedding_error",
    "svd",
    "svd_sketch",
    "tail_index_p",
    "with_seed",
]
