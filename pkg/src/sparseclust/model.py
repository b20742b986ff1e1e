"""Shared data model: observations, center estimates, fusion graph, penalties.

All types are immutable value objects once constructed and safe to share
across parallel workers.  Observation indices inside :class:`Edge` are
1-based (``1 <= i1 < i2 <= n``), as are cluster ids and feature indices in
:class:`ClusteringResult`; the solvers work on cached 0-based arrays.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.sparse as sp

from . import prox as _prox


def _as_matrix(values):
    a = np.asarray(values, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


class DataMatrix:
    """An n x p observation matrix with feature-centered columns.

    Construction validates that every column sums to zero (within
    ``1e-10 * n``) and that all entries are finite.  Use
    :func:`center_features` to build one from raw data.
    """

    def __init__(self, values):
        a = _as_matrix(values)
        if not np.all(np.isfinite(a)):
            raise ValueError("data matrix contains non-finite entries")
        n = a.shape[0]
        colsums = a.sum(axis=0)
        if np.any(np.abs(colsums) > 1e-10 * max(n, 1)):
            raise ValueError("columns are not centered; use center_features()")
        self.values = a.copy(order="F")
        self.values.setflags(write=False)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]


class CenterEstimate:
    """An n x p matrix of cluster-center estimates, column-centered."""

    def __init__(self, values):
        a = _as_matrix(values)
        if not np.all(np.isfinite(a)):
            raise ValueError("center estimate contains non-finite entries")
        n = a.shape[0]
        colsums = a.sum(axis=0)
        if np.any(np.abs(colsums) > 1e-8 * max(n, 1)):
            raise ValueError("center estimate columns are not centered")
        self.values = a.copy(order="F")
        self.values.setflags(write=False)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class Edge:
    """An undirected fusion edge between observations i1 < i2 (1-based)."""

    i1: int
    i2: int
    weight: float

    def __post_init__(self):
        if not (1 <= self.i1 < self.i2):
            raise ValueError(f"edge requires 1 <= i1 < i2, got ({self.i1}, {self.i2})")
        if not (self.weight >= 0.0 and np.isfinite(self.weight)):
            raise ValueError(f"edge weight must be finite and >= 0, got {self.weight}")


class FusionGraph:
    """An ordered list of positively weighted fusion edges on n observations.

    Zero-weight pairs are pruned at construction: the solvers' active working
    set scales with the number of stored edges, and a zero weight contributes
    nothing to the penalty.
    """

    def __init__(self, n, edges):
        self.n = int(n)
        kept = []
        seen = set()
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(*e)
            if e.i2 > self.n:
                raise ValueError(f"edge {e} out of range for n={self.n}")
            if (e.i1, e.i2) in seen:
                raise ValueError(f"duplicate edge ({e.i1}, {e.i2})")
            seen.add((e.i1, e.i2))
            if e.weight > 0.0:
                kept.append(e)
        self.edges = tuple(kept)
        self._i1 = np.array([e.i1 - 1 for e in kept], dtype=np.intp)
        self._i2 = np.array([e.i2 - 1 for e in kept], dtype=np.intp)
        self._w = np.array([e.weight for e in kept], dtype=float)
        self._w.setflags(write=False)

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def weights(self):
        return self._w

    def endpoint_arrays(self):
        """0-based endpoint index arrays (i1, i2) for vectorized edge ops."""
        return self._i1, self._i2

    def incidence(self):
        """Signed edge-node incidence matrix (|E| x n, sparse CSR), cached."""
        S = getattr(self, "_incidence", None)
        if S is None:
            E = self.num_edges
            rows = np.repeat(np.arange(E, dtype=np.intp), 2)
            cols = np.empty(2 * E, dtype=np.intp)
            cols[0::2] = self._i1
            cols[1::2] = self._i2
            data = np.tile(np.array([1.0, -1.0]), E)
            S = sp.csr_matrix((data, (rows, cols)), shape=(E, self.n))
            self._incidence = S
        return S

    def edge_diffs(self, A):
        """Row differences A[i1] - A[i2] over edges; shape (num_edges, p)."""
        A = np.asarray(A)
        return A[self._i1] - A[self._i2]

    def scatter_edges(self, vals, out=None, scale=1.0):
        """Accumulate scale * sum_l vals[l] * (e_i1 - e_i2) into an (n, p) array."""
        vals = np.atleast_2d(np.asarray(vals, dtype=float))
        if out is None:
            out = np.zeros((self.n, vals.shape[1]))
        contrib = scale * vals if scale != 1.0 else vals
        np.add.at(out, self._i1, contrib)
        np.subtract.at(out, self._i2, contrib)
        return out

    def is_connected(self):
        """True when the edge set spans all n observations in one component."""
        if self.n <= 1:
            return True
        labels = connected_components(self.n, self._i1, self._i2)
        return labels.max() == 0

    def degrees(self):
        deg = np.zeros(self.n, dtype=np.intp)
        np.add.at(deg, self._i1, 1)
        np.add.at(deg, self._i2, 1)
        return deg


def connected_components(n, i1, i2):
    """Component label (0-based, by first occurrence) for each of n nodes."""
    parent = np.arange(n, dtype=np.intp)

    def find(a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    for a, b in zip(i1, i2):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    labels = np.empty(n, dtype=np.intp)
    next_id = 0
    roots = {}
    for v in range(n):
        r = find(v)
        if r not in roots:
            roots[r] = next_id
            next_id += 1
        labels[v] = roots[r]
    return labels


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty strengths, norm selector, and the augmented-Lagrangian constant.

    ``q`` picks the fusion norm (1, 2 or 'inf').  ``nu`` defaults to a
    solver-specific value when None (1.0 for the ADMM solver, 1/n for the
    AMA solver).  ``feature_factors`` is the length-p adaptive group-lasso
    factor vector; None means uniform factors of 1.
    """

    gamma1: float
    gamma2: float
    q: object = 2
    nu: Optional[float] = None
    feature_factors: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError("gamma1 and gamma2 must be nonnegative")
        if self.nu is not None and not self.nu > 0:
            raise ValueError("nu must be positive")
        _prox.as_norm(self.q)
        if self.feature_factors is not None:
            u = np.asarray(self.feature_factors, dtype=float)
            if u.ndim != 1 or not np.all(np.isfinite(u)) or np.any(u < 0):
                raise ValueError("feature_factors must be a finite nonnegative vector")
            object.__setattr__(self, "feature_factors", u)

    @property
    def norm(self):
        return _prox.as_norm(self.q)

    def factors(self, p):
        if self.feature_factors is None:
            return np.ones(p)
        if self.feature_factors.size != p:
            raise ValueError(
                f"feature_factors has length {self.feature_factors.size}, expected {p}"
            )
        return self.feature_factors

    def resolve_nu(self, n, solver):
        if self.nu is not None:
            return self.nu
        return 1.0 if solver == "sadmm" else 1.0 / n


@dataclass
class DualState:
    """Per-edge dual vectors (and ADMM slacks); arrays of shape (|E|, p)."""

    lambdas: np.ndarray
    slacks: Optional[np.ndarray] = None


@dataclass
class SolverOptions:
    tol: float = 1e-6
    max_iter: int = 10_000
    center_iterates: bool = True
    warm_centers: Optional[np.ndarray] = None
    warm_duals: Optional[DualState] = None


@dataclass
class SolverDiagnostics:
    """Iterations used, convergence flag, final objective and residuals.

    ``residual`` is the primal feasibility residual max_l ||v_l - A_i1 +
    A_i2|| / sqrt(p) for the ADMM solver and the final dual-step relative
    change for the AMA solver; ``rel_change`` is the relative change of the
    center estimate at exit.
    """

    iterations: int
    converged: bool
    objective: float
    residual: float
    rel_change: float


class FitResult(NamedTuple):
    centers: "CenterEstimate"
    duals: "DualState"
    diagnostics: "SolverDiagnostics"


@dataclass
class ClusteringResult:
    """A partition of the observations plus the selected-feature set.

    ``assignment`` holds cluster ids 1..K in order of first occurrence;
    ``selected_features`` holds 1-based feature indices.
    """

    assignment: np.ndarray
    num_clusters: int
    selected_features: frozenset
    centers: Optional[CenterEstimate] = None
    diagnostics: Optional[SolverDiagnostics] = None

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=int)
        ids = np.unique(a)
        if ids.size and (ids.min() != 1 or ids.max() != ids.size):
            raise ValueError("cluster ids must form a contiguous range 1..K")
        if ids.size != self.num_clusters:
            raise ValueError("num_clusters disagrees with assignment")
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "selected_features", frozenset(int(j) for j in self.selected_features))


def center_features(raw):
    """Center each column of a raw n x p matrix and wrap it as a DataMatrix.

    Raises ValueError on non-finite entries or fewer than two observations.
    """
    a = _as_matrix(raw)
    if not np.all(np.isfinite(a)):
        raise ValueError("input contains non-finite entries")
    if a.shape[0] < 2:
        raise ValueError(f"need at least 2 observations, got {a.shape[0]}")
    if a.shape[1] < 1:
        raise ValueError("need at least 1 feature")
    centered = a - a.mean(axis=0, keepdims=True)
    # Kill accumulated rounding so the column-sum invariant holds exactly enough.
    centered -= centered.mean(axis=0, keepdims=True)
    return DataMatrix(centered)


def column_means(raw):
    """Column means of a raw matrix (the shift removed by center_features)."""
    return _as_matrix(raw).mean(axis=0)


def objective_value(X, A, graph, cfg):
    """Evaluate the sparse convex clustering objective.

    0.5 * sum_j ||x_j - a_j||^2
      + gamma1 * sum_l w_l ||A_i1 - A_i2||_q
      + gamma2 * sum_j u_j ||a_j||_2
    """
    Xv = X.values if isinstance(X, DataMatrix) else np.asarray(X, dtype=float)
    Av = A.values if isinstance(A, CenterEstimate) else np.asarray(A, dtype=float)
    if Xv.shape != Av.shape:
        raise ValueError(f"shape mismatch: X is {Xv.shape}, A is {Av.shape}")
    if graph.n != Xv.shape[0]:
        raise ValueError("fusion graph size does not match the data")
    return objective_value_arrays(Xv, Av, graph, cfg)


def objective_value_arrays(Xv, Av, graph, cfg):
    fit = 0.5 * float(np.sum((Xv - Av) ** 2))
    fusion = 0.0
    if graph.num_edges and cfg.gamma1 > 0:
        D = graph.edge_diffs(Av)
        norm = cfg.norm
        if norm == _prox.L2:
            pen = np.linalg.norm(D, axis=1)
        elif norm == _prox.L1:
            pen = np.abs(D).sum(axis=1)
        else:
            pen = np.abs(D).max(axis=1) if D.size else np.zeros(0)
        fusion = cfg.gamma1 * float(np.dot(graph.weights, pen))
    sparsity = 0.0
    if cfg.gamma2 > 0:
        u = cfg.factors(Xv.shape[1])
        sparsity = cfg.gamma2 * float(np.dot(u, np.linalg.norm(Av, axis=0)))
    return fit + fusion + sparsity
