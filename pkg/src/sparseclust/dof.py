"""Unbiased degrees-of-freedom estimators for the q=1 and q=2 fits.

Treating the fit as a penalized regression of vec(A) on vec(X), df is the
trace of the derivative of the solution map.  The estimators detect the
active penalty rows at the solution, project onto the null space of the
inactive rows, and correct by the curvature of the active norm terms.
Everything is built densely under a hard size guard: this is a small-problem
diagnostic, not a hot path.

vec() is column stacking: block j of the length-n*p vector is feature j.
"""

import warnings

import numpy as np

DENSE_GUARD = 2000
ACTIVE_TOL = 1e-8


def _vectorize(a_hat, n, p):
    a = np.asarray(a_hat, dtype=float)
    if a.ndim == 2:
        if a.shape != (n, p):
            raise ValueError(f"center estimate has shape {a.shape}, expected {(n, p)}")
        return a.reshape(-1, order="F")
    if a.size != n * p:
        raise ValueError(f"vectorized estimate has length {a.size}, expected {n * p}")
    return a.copy()


def _null_projector(rows, dim):
    """Orthogonal projector onto the null space of the stacked row matrix."""
    if not rows:
        return np.eye(dim)
    D = np.vstack(rows)
    gram = D.T @ D
    evals, evecs = np.linalg.eigh(gram)
    cutoff = max(evals[-1], 1.0) * 1e-11
    V = evecs[:, evals <= cutoff]
    return V @ V.T


def _edge_rows_inactive_q1(graph, diffs, tol):
    """2-sparse rows w_s (e_i1 - e_i2) in block j, for inactive (s, j) pairs."""
    i1, i2 = graph.endpoint_arrays()
    w = graph.weights
    n = graph.n
    p = diffs.shape[1]
    rows = []
    for s in range(graph.num_edges):
        for j in range(p):
            if abs(w[s] * diffs[s, j]) <= tol:
                r = np.zeros(n * p)
                r[j * n + i1[s]] = w[s]
                r[j * n + i2[s]] = -w[s]
                rows.append(r)
    return rows


def _edge_block(graph, s, n, p):
    """Dense p x (n*p) block D_s = w_s (I_p kron (e_i1 - e_i2)^T)."""
    i1, i2 = graph.endpoint_arrays()
    w = graph.weights[s]
    block = np.zeros((p, n * p))
    for j in range(p):
        block[j, j * n + i1[s]] = w
        block[j, j * n + i2[s]] = -w
    return block


def _feature_block(j, u_j, n, p):
    """Dense n x (n*p) block D_{|E|+j} = u_j (e_j*^T kron I_n)."""
    block = np.zeros((n, n * p))
    block[np.arange(n), j * n + np.arange(n)] = u_j
    return block


def _curvature(block, a):
    """D'D/||Da|| - D'D a a' D'D / ||Da||^3 for one active block."""
    Da = block @ a
    nrm = np.linalg.norm(Da)
    DtD = block.T @ block
    v = DtD @ a
    return DtD / nrm - np.outer(v, v) / nrm**3


def _trace_of_inverse_times(Tmat, P):
    try:
        return float(np.trace(np.linalg.solve(Tmat, P)))
    except np.linalg.LinAlgError:
        warnings.warn("singular curvature system; falling back to pseudo-inverse")
        return float(np.trace(np.linalg.pinv(Tmat) @ P))


def _guard(n, p):
    if n * p > DENSE_GUARD:
        raise ValueError(f"df estimator limited to n*p <= {DENSE_GUARD}, got {n * p}")


def df_q1(X, a_hat, graph, cfg, active_tol=ACTIVE_TOL):
    """Degrees of freedom of the q=1 fit via the active-set trace formula.

    Only the group-lasso blocks contribute curvature (the componentwise
    fusion terms are piecewise linear); the fusion penalty enters through the
    projector onto the null space of the inactive rows.
    """
    Xv = X.values if hasattr(X, "values") else np.asarray(X, dtype=float)
    n, p = Xv.shape
    _guard(n, p)
    a = _vectorize(a_hat, n, p)
    A = a.reshape((n, p), order="F")
    u = cfg.factors(p)
    col_norms = np.linalg.norm(A, axis=0)

    inactive_rows = []
    if cfg.gamma1 > 0 and graph.num_edges:
        diffs = graph.edge_diffs(A)
        inactive_rows.extend(_edge_rows_inactive_q1(graph, diffs, active_tol))
    active_features = []
    if cfg.gamma2 > 0:
        for j in range(p):
            if u[j] * col_norms[j] > active_tol:
                active_features.append(j)
            else:
                inactive_rows.append(_feature_block(j, u[j], n, p))

    P1 = _null_projector(inactive_rows, n * p)
    K = np.zeros((n * p, n * p))
    for j in active_features:
        K += _curvature(_feature_block(j, u[j], n, p), a)
    Tmat = np.eye(n * p) + cfg.gamma2 * (P1 @ K)
    return _trace_of_inverse_times(Tmat, P1)


def df_q2(X, a_hat, graph, cfg, active_tol=ACTIVE_TOL):
    """Degrees of freedom of the q=2 fit: both penalty families curve."""
    Xv = X.values if hasattr(X, "values") else np.asarray(X, dtype=float)
    n, p = Xv.shape
    _guard(n, p)
    a = _vectorize(a_hat, n, p)
    A = a.reshape((n, p), order="F")
    u = cfg.factors(p)
    col_norms = np.linalg.norm(A, axis=0)

    inactive_rows = []
    K_edges = np.zeros((n * p, n * p))
    if cfg.gamma1 > 0 and graph.num_edges:
        diffs = graph.edge_diffs(A)
        norms = graph.weights * np.linalg.norm(diffs, axis=1)
        for s in range(graph.num_edges):
            block = _edge_block(graph, s, n, p)
            if norms[s] > active_tol:
                K_edges += _curvature(block, a)
            else:
                inactive_rows.append(block)
    K_feats = np.zeros((n * p, n * p))
    if cfg.gamma2 > 0:
        for j in range(p):
            block = _feature_block(j, u[j], n, p)
            if u[j] * col_norms[j] > active_tol:
                K_feats += _curvature(block, a)
            else:
                inactive_rows.append(block)

    P2 = _null_projector(inactive_rows, n * p)
    Tmat = np.eye(n * p) + cfg.gamma1 * (P2 @ K_edges) + cfg.gamma2 * (P2 @ K_feats)
    return _trace_of_inverse_times(Tmat, P2)


def penalty_row_matrix(graph, cfg, n, p):
    """The full stacked penalty matrix D (edge blocks then feature blocks).

    Exposed for verification: D has p*|E| + n*p rows and n*p columns.
    """
    _guard(n, p)
    u = cfg.factors(p)
    blocks = [_edge_block(graph, s, n, p) for s in range(graph.num_edges)]
    blocks.extend(_feature_block(j, u[j], n, p) for j in range(p))
    if not blocks:
        return np.zeros((0, n * p))
    return np.vstack(blocks)
