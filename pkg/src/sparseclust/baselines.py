"""Comparator clusterers: Lloyd k-means with k-means++ seeding, and plain
convex clustering (the gamma2 = 0 special case of the sparse solvers).

k-means reports every feature as selected; it has no selection mechanism.
"""

import numpy as np

from .extract import extract_clusters
from .model import (
    CenterEstimate,
    ClusteringResult,
    DataMatrix,
    PenaltyConfig,
    SolverDiagnostics,
)

_LLOYD_MAX_ITER = 300


def kmeans(X, k, restarts=10, rng=None):
    """Best-of-restarts Lloyd k-means; deterministic under a seeded rng.

    Empty clusters are repaired by reseeding them at the point farthest from
    its assigned center.  The returned centers matrix has each observation's
    row replaced by its cluster centroid, mirroring the convex solvers.
    """
    Xv = X.values if isinstance(X, DataMatrix) else np.asarray(X, dtype=float)
    n, p = Xv.shape
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    best = None
    for _ in range(max(1, restarts)):
        labels, centroids, wcss, iters, _ = _lloyd(Xv, k, rng)
        if best is None or wcss < best[2]:
            best = (labels, centroids, wcss, iters)
    labels, centroids, wcss, iters = best
    assignment = _relabel_first_occurrence(labels)
    row_centers = centroids[labels]
    diag = SolverDiagnostics(iterations=iters, converged=True,
                             objective=wcss, residual=0.0, rel_change=0.0)
    centers = None
    if isinstance(X, DataMatrix):
        centers = CenterEstimate(row_centers - row_centers.mean(axis=0))
    return ClusteringResult(
        assignment=assignment,
        num_clusters=int(assignment.max()),
        selected_features=frozenset(range(1, p + 1)),
        centers=centers,
        diagnostics=diag,
    )


def _lloyd(Xv, k, rng):
    """One seeded Lloyd run; returns labels, centroids, wcss, iters, history."""
    centroids = _kmeanspp_seed(Xv, k, rng)
    labels = _assign(Xv, centroids)
    history = []
    prev_wcss = np.inf
    it = 0
    for it in range(1, _LLOYD_MAX_ITER + 1):
        for c in range(k):
            members = labels == c
            if not members.any():
                far = int(np.argmax(np.linalg.norm(Xv - centroids[labels], axis=1)))
                centroids[c] = Xv[far]
                labels[far] = c
                members = labels == c
            centroids[c] = Xv[members].mean(axis=0)
        new_labels = _assign(Xv, centroids)
        wcss = float(np.sum((Xv - centroids[new_labels]) ** 2))
        history.append(wcss)
        stable = np.array_equal(new_labels, labels)
        labels = new_labels
        if stable or wcss >= prev_wcss - 1e-12:
            prev_wcss = min(prev_wcss, wcss)
            break
        prev_wcss = wcss
    return labels, centroids, prev_wcss, it, history


def _assign(Xv, centroids):
    d2 = ((Xv[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def _kmeanspp_seed(Xv, k, rng):
    n = Xv.shape[0]
    centers = np.empty((k, Xv.shape[1]))
    chosen = np.zeros(n, dtype=bool)
    first = int(rng.integers(n))
    centers[0] = Xv[first]
    chosen[first] = True
    d2 = ((Xv - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # Remaining points coincide with a center; take the first unused.
            idx = int(np.nonzero(~chosen)[0][0])
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[c] = Xv[idx]
        chosen[idx] = True
        d2 = np.minimum(d2, ((Xv - centers[c]) ** 2).sum(axis=1))
    return centers


def _relabel_first_occurrence(labels):
    mapping = {}
    out = np.empty(labels.size, dtype=int)
    nxt = 1
    for i, lab in enumerate(labels):
        if lab not in mapping:
            mapping[lab] = nxt
            nxt += 1
        out[i] = mapping[lab]
    return out


def convex_clustering(X, graph, gamma1, q=2, solver="sama", opts=None,
                      merge_tol=None):
    """Plain convex clustering: the sparse solvers with gamma2 = 0.

    All features are reported as selected (nothing is penalized to zero).
    """
    from . import admm, ama
    from .extract import DEFAULT_MERGE_TOL

    if gamma1 < 0:
        raise ValueError("gamma1 must be nonnegative")
    cfg = PenaltyConfig(gamma1=float(gamma1), gamma2=0.0, q=q)
    run = ama.run_sama if solver == "sama" else admm.run_sadmm
    fit = run(X, graph, cfg, opts)
    result = extract_clusters(fit.centers, graph,
                              DEFAULT_MERGE_TOL if merge_tol is None else merge_tol,
                              diagnostics=fit.diagnostics)
    p = fit.centers.values.shape[1]
    result.selected_features = frozenset(range(1, p + 1))
    return result
