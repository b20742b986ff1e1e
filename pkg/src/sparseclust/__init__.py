"""sparseclust: sparse convex clustering.

Simultaneous observation clustering and feature selection by penalized
center estimation: a fused penalty on pairwise center differences merges
observations into clusters while an adaptive group-lasso penalty on feature
columns zeroes out uninformative features.  Two splitting solvers are
provided (ADMM- and AMA-based), plus weight construction, tuning by
bootstrap stability or validation Rand index, degrees-of-freedom
estimators, metrics, benchmark data generators, and a batch CLI.
"""

from .admm import NTransform, group_lasso_subproblem, pseudo_response, run_sadmm, update_Lambda_admm, update_V
from .ama import blockwise_soft_threshold, run_sama, update_Lambda_ama, z_aggregate
from .baselines import convex_clustering, kmeans
from .dof import df_q1, df_q2
from .extract import clustering_path, extract_clusters, selected_features
from .metrics import fnr_fpr, rand_index
from .model import (
    CenterEstimate,
    ClusteringResult,
    DataMatrix,
    DualState,
    Edge,
    FitResult,
    FusionGraph,
    PenaltyConfig,
    SolverDiagnostics,
    SolverOptions,
    center_features,
    objective_value,
)
from .prox import dual_norm, project_ball, prox
from .simulate import SimSpec, generate, generate_half_moons, generate_spherical, setting_spec
from .tuning import StabilityConfig, stability_score, tune_stability, tune_validation_rand
from .weights import WeightConfig, adaptive_feature_factors, build_fusion_weights, rescale_fusion_weights

__version__ = "0.1.0"

__all__ = [
    "CenterEstimate", "ClusteringResult", "DataMatrix", "DualState", "Edge",
    "FitResult", "FusionGraph", "NTransform", "PenaltyConfig", "SimSpec",
    "SolverDiagnostics", "SolverOptions", "StabilityConfig", "WeightConfig",
    "adaptive_feature_factors", "blockwise_soft_threshold", "build_fusion_weights",
    "center_features", "clustering_path", "convex_clustering", "df_q1", "df_q2",
    "dual_norm", "extract_clusters", "fnr_fpr", "generate", "generate_half_moons",
    "generate_spherical", "group_lasso_subproblem", "kmeans", "objective_value",
    "project_ball", "prox", "pseudo_response", "rand_index", "rescale_fusion_weights",
    "run_sadmm", "run_sama", "selected_features", "setting_spec", "stability_score",
    "tune_stability", "tune_validation_rand", "update_Lambda_admm", "update_Lambda_ama",
    "update_V", "z_aggregate",
]
