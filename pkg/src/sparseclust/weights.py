"""Fusion weights (m-nearest-neighbor Gaussian kernel) and adaptive factors.

Edge weights follow w_{i1,i2} = iota^m_{i1,i2} * exp(-phi * ||X_i1 - X_i2||^2),
where the indicator is 1 when i2 is among i1's m nearest neighbors *or vice
versa*.  Weights are rescaled to sum to 1/sqrt(p) and the adaptive
group-lasso factors to sum to 1/sqrt(n), keeping good tuning ranges roughly
stable across problem sizes.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import squareform, pdist

from .model import DataMatrix, Edge, FusionGraph

# Cap applied to 1/||a_j|| for features the pilot fit zeroed out entirely:
# 1e6 times the smallest positive reciprocal keeps the factor finite while
# still annihilating the feature after the soft threshold.
ZERO_NORM_CAP_RATIO = 1e6


@dataclass(frozen=True)
class WeightConfig:
    """Nearest-neighbor count and Gaussian kernel bandwidth multiplier."""

    m: int = 5
    phi: float = 0.5

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.phi < 0:
            raise ValueError("phi must be nonnegative")


def build_fusion_weights(X, cfg=WeightConfig()):
    """Build the kNN Gaussian-kernel fusion graph for a centered data matrix.

    An edge (i1, i2) is present iff one endpoint is among the other's m
    nearest neighbors in Euclidean distance (ties broken by smaller index),
    and carries weight exp(-phi * d^2).
    """
    Xv = X.values if isinstance(X, DataMatrix) else np.asarray(X, dtype=float)
    n = Xv.shape[0]
    if not 1 <= cfg.m < n:
        raise ValueError(f"need 1 <= m < n, got m={cfg.m}, n={n}")
    d2 = squareform(pdist(Xv, "sqeuclidean"))
    neighbor = _knn_mask(d2, cfg.m)
    keep = neighbor | neighbor.T
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if keep[i, j]:
                w = float(np.exp(-cfg.phi * d2[i, j]))
                if w > 0.0:
                    edges.append(Edge(i + 1, j + 1, w))
    return FusionGraph(n, edges)


def _knn_mask(d2, m):
    """neighbor[i, j] is True when j is among i's m nearest (ties by index)."""
    n = d2.shape[0]
    neighbor = np.zeros((n, n), dtype=bool)
    idx = np.arange(n)
    for i in range(n):
        order = np.lexsort((idx, d2[i]))
        order = order[order != i][:m]
        neighbor[i, order] = True
    return neighbor


def rescale_fusion_weights(graph, p):
    """Rescale edge weights proportionally so they sum to 1/sqrt(p)."""
    total = float(graph.weights.sum())
    if total <= 0.0:
        raise ValueError("graph has no positive weight to rescale")
    scale = 1.0 / (np.sqrt(p) * total)
    edges = [Edge(e.i1, e.i2, e.weight * scale) for e in graph.edges]
    return FusionGraph(graph.n, edges)


def adaptive_feature_factors(X, graph, gamma1, solver="sama", opts=None):
    """Adaptive group-lasso factors u_j = 1 / ||a_j^(0)||, rescaled to 1/sqrt(n).

    The pilot estimate a^(0) solves the clustering problem with gamma2 = 0
    using the requested solver, so informative features (large pilot norms)
    are penalized less.  Zero-norm pilot columns get a large-but-finite
    factor before rescaling.
    """
    from .model import PenaltyConfig

    Xv = X.values if isinstance(X, DataMatrix) else np.asarray(X, dtype=float)
    if gamma1 < 0:
        raise ValueError("gamma1 must be nonnegative")
    if gamma1 == 0.0:
        pilot = Xv
    else:
        from . import admm, ama

        cfg0 = PenaltyConfig(gamma1=gamma1, gamma2=0.0, q=2)
        run = ama.run_sama if solver == "sama" else admm.run_sadmm
        pilot = run(X, graph, cfg0, opts).centers.values
    return factors_from_pilot(pilot)


def factors_from_pilot(pilot):
    """Reciprocal column norms of a pilot fit, rescaled to sum to 1/sqrt(n)."""
    pilot = np.asarray(pilot, dtype=float)
    n = pilot.shape[0]
    norms = np.linalg.norm(pilot, axis=0)
    pos = norms > 0
    if not np.any(pos):
        u = np.ones_like(norms)
    else:
        u = np.empty_like(norms)
        u[pos] = 1.0 / norms[pos]
        u[~pos] = ZERO_NORM_CAP_RATIO * u[pos].min()
    return u / (np.sqrt(n) * u.sum())
