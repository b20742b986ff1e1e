"""Sparse alternating-minimization solver (S-AMA).

Each sweep rebuilds the center matrix column by column with a closed-form
blockwise soft threshold and then takes a projected dual-gradient step per
edge.  Only positively weighted edges carry dual variables: a zero-weight
edge constrains its multiplier to the zero ball, so it can never contribute.

The center update is an independent map over features and the dual update an
independent map over edges; both are executed as whole-matrix vectorized
operations, so results do not depend on any worker layout.
"""

import numpy as np

from . import prox as _prox
from .model import (
    CenterEstimate,
    DataMatrix,
    DualState,
    FitResult,
    SolverDiagnostics,
    SolverOptions,
    objective_value_arrays,
)


def z_aggregate(xj, duals, graph, j):
    """Aggregate x_j plus the scatter of the j-th dual components over edges."""
    xj = np.asarray(xj, dtype=float)
    if graph.n != xj.size:
        raise ValueError("graph size does not match the feature vector")
    z = xj.copy()
    if graph.num_edges:
        lam_j = np.asarray(duals.lambdas, dtype=float)[:, j]
        i1, i2 = graph.endpoint_arrays()
        np.add.at(z, i1, lam_j)
        np.subtract.at(z, i2, lam_j)
    return z


def blockwise_soft_threshold(zj, kappa):
    """(1 - kappa/||z||)_+ z, with an exactly-zero result when ||z|| <= kappa."""
    zj = np.asarray(zj, dtype=float)
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    nrm = np.linalg.norm(zj)
    if nrm <= kappa:
        return np.zeros_like(zj)
    return (1.0 - kappa / nrm) * zj


def update_Lambda_ama(state, A, graph, cfg):
    """Projected dual-gradient step: P_{C_l}[lambda_l - nu (A_i1 - A_i2)]."""
    Av = A.values if isinstance(A, CenterEstimate) else np.asarray(A, dtype=float)
    nu = cfg.resolve_nu(Av.shape[0], "sama")
    D = graph.edge_diffs(Av)
    radii = cfg.gamma1 * graph.weights
    stepped = state.lambdas - nu * D
    projected = _prox.project_ball_rows(stepped, radii, _prox.dual_norm(cfg.q))
    return DualState(lambdas=projected, slacks=None)


def run_sama(X, graph, cfg, opts=None):
    """Run S-AMA to convergence and return (centers, duals, diagnostics).

    Stops when the relative changes of both the center matrix and the dual
    matrix fall below ``opts.tol``; hitting ``opts.max_iter`` first flags the
    result as non-converged rather than raising.
    """
    opts = opts or SolverOptions()
    Xv = X.values if isinstance(X, DataMatrix) else np.asarray(X, dtype=float)
    A, lam, diag = _run_sama_arrays(
        Xv,
        graph,
        cfg,
        tol=opts.tol,
        max_iter=opts.max_iter,
        center_iterates=opts.center_iterates,
        warm_duals=opts.warm_duals,
    )
    centers = CenterEstimate(A) if opts.center_iterates else A
    return FitResult(centers, DualState(lambdas=lam), diag)


def _run_sama_arrays(Xv, graph, cfg, tol=1e-6, max_iter=10_000,
                     center_iterates=True, warm_duals=None):
    n, p = Xv.shape
    nu = cfg.resolve_nu(n, "sama")
    kappas = cfg.gamma2 * cfg.factors(p)
    radii = cfg.gamma1 * graph.weights
    dual_q = _prox.dual_norm(cfg.q)
    E = graph.num_edges
    S = graph.incidence() if E else None

    lam = np.zeros((E, p))
    if warm_duals is not None and warm_duals.lambdas is not None and E:
        lam = np.asarray(warm_duals.lambdas, dtype=float).copy()
        # Re-project so dual feasibility holds for the current gamma1/weights.
        lam = _prox.project_ball_rows(lam, radii, dual_q)

    A_prev = None
    A = Xv.copy()
    converged = False
    rel_change = np.inf
    dual_change = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        Z = Xv + S.T.dot(lam) if E else Xv.copy()
        norms = np.linalg.norm(Z, axis=0)
        scale = np.zeros(p)
        alive = norms > kappas
        scale[alive] = 1.0 - kappas[alive] / norms[alive]
        A = Z * scale
        if center_iterates:
            A = A - A.mean(axis=0)
            A[:, ~alive] = 0.0
        if E:
            D = S.dot(A)
            lam_new = _prox.project_ball_rows(lam - nu * D, radii, dual_q)
            dual_change = np.linalg.norm(lam_new - lam) / max(1.0, np.linalg.norm(lam))
            lam = lam_new
        else:
            dual_change = 0.0
        if A_prev is not None:
            rel_change = np.linalg.norm(A - A_prev) / max(1.0, np.linalg.norm(A_prev))
            if max(rel_change, dual_change) <= tol:
                converged = True
                A_prev = A
                break
        A_prev = A

    diag = SolverDiagnostics(
        iterations=it,
        converged=converged,
        objective=objective_value_arrays(Xv, A, graph, cfg),
        residual=dual_change,
        rel_change=rel_change if np.isfinite(rel_change) else 0.0,
    )
    return A, lam, diag
