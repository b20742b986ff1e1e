"""Proximal maps of the L1/L2/Linf norms and projections onto their dual balls.

These are the atomic operators of both splitting solvers: the slack update
applies ``prox`` edge by edge, and the dual update projects each multiplier
onto a ball of the dual norm.  Both single-vector and row-batched variants
are provided; the batched ones are what the solvers call in their hot loops.
"""

import numpy as np

L1 = "l1"
L2 = "l2"
LINF = "linf"

_ALIASES = {
    1: L1, "1": L1, "l1": L1, "L1": L1,
    2: L2, "2": L2, "l2": L2, "L2": L2,
    np.inf: LINF, float("inf"): LINF, "inf": LINF, "linf": LINF,
    "Linf": LINF, "LINF": LINF,
}

_DUAL = {L1: LINF, L2: L2, LINF: L1}


def as_norm(q):
    """Normalize a norm selector (1, 2, inf, or a string) to a canonical tag."""
    try:
        return _ALIASES[q]
    except (KeyError, TypeError):
        raise ValueError(f"unknown norm selector {q!r}; expected 1, 2 or 'inf'")


def dual_norm(q):
    """Dual norm tag: L1 <-> Linf, L2 self-dual."""
    return _DUAL[as_norm(q)]


def _check_finite(u):
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("non-finite entries in input vector")
    return u


def prox(u, sigma, norm):
    """Proximal map of sigma * ||.||_q at u.

    Returns argmin_v  sigma*||v||_q + 0.5*||u - v||_2^2 using the closed
    forms: blockwise shrinkage for L2, soft thresholding for L1, and the
    Moreau decomposition against the L1-ball projection for Linf.
    """
    u = _check_finite(u)
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    norm = as_norm(norm)
    if sigma == 0.0:
        return u.copy()
    if norm == L2:
        nrm = np.linalg.norm(u)
        if nrm == 0.0:
            return np.zeros_like(u)
        return max(0.0, 1.0 - sigma / nrm) * u
    if norm == L1:
        return np.sign(u) * np.maximum(np.abs(u) - sigma, 0.0)
    # Linf: prox = identity minus projection onto the L1 ball of radius sigma.
    return u - project_ball(u, sigma, L1)


def project_ball(z, radius, norm):
    """Euclidean projection of z onto the ball {y : ||y||_norm <= radius}."""
    z = _check_finite(z)
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    norm = as_norm(norm)
    if radius == 0.0:
        return np.zeros_like(z)
    if norm == L2:
        nrm = np.linalg.norm(z)
        if nrm <= radius:
            return z.copy()
        return (radius / nrm) * z
    if norm == LINF:
        return np.clip(z, -radius, radius)
    # L1 ball via the sort-and-shift simplex projection (Duchi et al.).
    if np.abs(z).sum() <= radius:
        return z.copy()
    return np.sign(z) * _project_simplex_sorted(np.abs(z), radius)


def _project_simplex_sorted(v, radius):
    """Project a nonnegative vector onto the simplex {y >= 0, sum(y) = radius}."""
    v_sorted = np.sort(v)[::-1]
    cumsum = np.cumsum(v_sorted) - radius
    ranks = np.arange(1, v.size + 1)
    rho = np.nonzero(v_sorted - cumsum / ranks > 0)[0][-1]
    theta = cumsum[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def prox_rows(U, sigmas, norm):
    """Row-batched prox: row l of the result is prox(U[l], sigmas[l], norm)."""
    U = np.asarray(U, dtype=float)
    sigmas = np.broadcast_to(np.asarray(sigmas, dtype=float), (U.shape[0],))
    norm = as_norm(norm)
    if norm == L2:
        nrms = np.linalg.norm(U, axis=1)
        scale = np.zeros_like(nrms)
        nz = nrms > 0
        scale[nz] = np.maximum(0.0, 1.0 - sigmas[nz] / nrms[nz])
        return U * scale[:, None]
    if norm == L1:
        s = sigmas[:, None]
        return np.sign(U) * np.maximum(np.abs(U) - s, 0.0)
    return U - project_ball_rows(U, sigmas, L1)


def project_ball_rows(Z, radii, norm):
    """Row-batched ball projection: row l lands in the ball of radii[l]."""
    Z = np.asarray(Z, dtype=float)
    radii = np.broadcast_to(np.asarray(radii, dtype=float), (Z.shape[0],))
    norm = as_norm(norm)
    if norm == L2:
        nrms = np.linalg.norm(Z, axis=1)
        scale = np.ones_like(nrms)
        over = nrms > radii
        scale[over] = radii[over] / nrms[over]
        return Z * scale[:, None]
    if norm == LINF:
        r = radii[:, None]
        return np.clip(Z, -r, r)
    # L1 ball, vectorized Duchi projection over rows.
    absZ = np.abs(Z)
    out = Z.copy()
    inside = absZ.sum(axis=1) <= radii
    rows = np.nonzero(~inside)[0]
    if rows.size == 0:
        out[radii == 0.0] = 0.0
        return out
    V = absZ[rows]
    r = radii[rows]
    V_sorted = np.sort(V, axis=1)[:, ::-1]
    cumsum = np.cumsum(V_sorted, axis=1) - r[:, None]
    ranks = np.arange(1, V.shape[1] + 1)
    mask = V_sorted - cumsum / ranks > 0
    rho = V.shape[1] - 1 - np.argmax(mask[:, ::-1], axis=1)
    theta = cumsum[np.arange(rows.size), rho] / (rho + 1.0)
    proj = np.maximum(V - theta[:, None], 0.0)
    out[rows] = np.sign(Z[rows]) * proj
    out[radii == 0.0] = 0.0
    return out
