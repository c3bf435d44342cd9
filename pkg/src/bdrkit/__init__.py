"""Robust block diagonal representation toolkit.

Recovers a block diagonal affinity structure, block sizes and cluster
memberships from an outlier-corrupted affinity or data matrix, via greedy
similarity ordering, sparsification, and piece-wise linear fitting of the
Laplacian's upper-triangular row-sum vector.
"""

from .clustering import (
    accuracy,
    conductance,
    kmeans,
    modularity,
    p_det,
    reconstruct_bd,
    spectral_cluster,
)
from .enhance import (
    SparsifyConfig,
    SparsifyInfo,
    Type1Report,
    apply_order,
    detect_type1,
    sbdo_order,
    sparsify,
)
from .matrix_core import (
    Spectrum,
    SymmetricGraph,
    build_affinity,
    clamp_zero_eigenvalues,
    eig_smallest,
    normalize_columns,
    vector_v,
)
from .oracle import (
    BlockSpec,
    CorruptedGraph,
    CorruptionSpec,
    SpectrumPrediction,
    gen_target_bd,
    inject_corruption,
    predict_eigs_group,
    predict_eigs_target,
    predict_eigs_type2,
    predict_v,
)
from .pipeline import PipelineResult, RunConfig, gen_synthetic, run_pipeline
from .vfit import (
    solve_penalized,
    ChangepointSet,
    PlaneFit,
    VEstimate,
    candidate_sizes,
    detect_changepoints,
    estimate_undesired,
    evaluate_candidate,
    fit_segment_plane,
    select_model,
    target_v_for_candidate,
)

__all__ = [
    "BlockSpec",
    "ChangepointSet",
    "CorruptedGraph",
    "CorruptionSpec",
    "PipelineResult",
    "PlaneFit",
    "RunConfig",
    "SparsifyConfig",
    "SparsifyInfo",
    "Spectrum",
    "SpectrumPrediction",
    "SymmetricGraph",
    "Type1Report",
    "VEstimate",
    "accuracy",
    "apply_order",
    "build_affinity",
    "candidate_sizes",
    "clamp_zero_eigenvalues",
    "conductance",
    "detect_changepoints",
    "detect_type1",
    "eig_smallest",
    "estimate_undesired",
    "evaluate_candidate",
    "fit_segment_plane",
    "gen_synthetic",
    "gen_target_bd",
    "inject_corruption",
    "kmeans",
    "modularity",
    "normalize_columns",
    "p_det",
    "predict_eigs_group",
    "predict_eigs_target",
    "predict_eigs_type2",
    "predict_v",
    "reconstruct_bd",
    "run_pipeline",
    "sbdo_order",
    "select_model",
    "solve_penalized",
    "sparsify",
    "spectral_cluster",
    "target_v_for_candidate",
    "vector_v",
]

__version__ = "0.1.0"
