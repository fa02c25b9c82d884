"""Weighted graphs, Laplacians and the eigen-computations built on them.

Edges are stored canonically as ``(i, j, w)`` with ``i < j`` and sorted
lexicographically, so an edge selection ``x`` is simply a 0/1 vector aligned
with ``graph.edges``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .settings import TOL

__all__ = [
    "GraphError",
    "NumericalError",
    "WeightedGraph",
    "SpectralResult",
    "build_graph",
    "as_selection",
    "selection_from_pairs",
    "selected_pairs",
    "laplacian",
    "laplacian_sparse",
    "fiedler",
    "algebraic_connectivity",
    "graph_fiedler",
    "smallest_eigenpair",
    "lifted_matrix",
    "is_connected",
    "UnionFind",
]


class GraphError(ValueError):
    """Invalid graph, edge or selection."""


class NumericalError(ArithmeticError):
    """An eigen-solve failed to reach the requested residual."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise GraphError(f"vertex count must be non-negative, got {self.n}")
        prev = None
        for e in self.edges:
            i, j, w = e
            _check_edge(self.n, i, j, w)
            if i > j:
                raise GraphError(f"edge {e} is not canonical (need i < j); use build_graph")
            if prev is not None and (i, j) <= prev:
                if (i, j) == prev:
                    raise GraphError(f"duplicate pair in edge {e}")
                raise GraphError(f"edges not sorted at {e}; use build_graph")
            prev = (i, j)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def heads(self) -> np.ndarray:
        return np.array([e[0] for e in self.edges], dtype=np.intp)

    @cached_property
    def tails(self) -> np.ndarray:
        return np.array([e[1] for e in self.edges], dtype=np.intp)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([e[2] for e in self.edges], dtype=float)

    @cached_property
    def index(self) -> dict[tuple[int, int], int]:
        """Map canonical pair ``(i, j)`` to its position in ``edges``."""
        return {(i, j): k for k, (i, j, _) in enumerate(self.edges)}

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j, _ in self.edges]

    def weight_matrix(self) -> np.ndarray:
        W = np.zeros((self.n, self.n))
        W[self.heads, self.tails] = self.weights
        W[self.tails, self.heads] = self.weights
        return W

    def scaled(self, t: float) -> "WeightedGraph":
        return WeightedGraph(self.n, tuple((i, j, w * t) for i, j, w in self.edges))


def _check_edge(n, i, j, w):
    e = (i, j, w)
    if not (0 <= i < n and 0 <= j < n):
        raise GraphError(f"out-of-range vertex in edge {e} (n={n})")
    if i == j:
        raise GraphError(f"self-loop in edge {e}")
    if not (w > 0) or not np.isfinite(w):
        raise GraphError(f"non-positive weight in edge {e}")


def build_graph(n: int, edges: Iterable[Sequence]) -> WeightedGraph:
    """Validate and canonicalize an edge list into a :class:`WeightedGraph`."""
    seen: dict[tuple[int, int], tuple] = {}
    for e in edges:
        i, j, w = int(e[0]), int(e[1]), float(e[2])
        _check_edge(n, i, j, w)
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphError(f"duplicate pair in edge {tuple(e)} (already have {seen[key]})")
        seen[key] = tuple(e)
    canon = tuple(sorted((i, j, float(seen[(i, j)][2])) for i, j in seen))
    return WeightedGraph(n, canon)


def as_selection(graph: WeightedGraph, x=None) -> np.ndarray:
    """Return ``x`` as a validated 0/1 float vector; ``None`` selects every edge."""
    if x is None:
        return np.ones(graph.m)
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != graph.m:
        raise GraphError(f"selection has length {x.shape[0]}, graph has {graph.m} edges")
    if not np.all((x == 0) | (x == 1)):
        raise GraphError("selection entries must be 0 or 1")
    return x


def selection_from_pairs(graph: WeightedGraph, pairs: Iterable[Sequence[int]]) -> np.ndarray:
    x = np.zeros(graph.m)
    for p in pairs:
        key = (min(p[0], p[1]), max(p[0], p[1]))
        try:
            x[graph.index[key]] = 1.0
        except KeyError:
            raise GraphError(f"pair {key} is not an edge of the graph") from None
    return x


def selected_pairs(graph: WeightedGraph, x) -> list[tuple[int, int]]:
    x = as_selection(graph, x)
    return [graph.edges[k][:2] for k in np.flatnonzero(x)]


def laplacian(graph: WeightedGraph, x=None) -> np.ndarray:
    """Dense ``L(x) = sum_ij x_ij w_ij (e_i - e_j)(e_i - e_j)^T``."""
    x = as_selection(graph, x)
    n = graph.n
    wx = graph.weights * x
    L = np.zeros((n, n))
    if graph.m:
        h, t = graph.heads, graph.tails
        L[h, t] = -wx
        L[t, h] = -wx
        deg = np.bincount(h, weights=wx, minlength=n) + np.bincount(t, weights=wx, minlength=n)
        L[np.arange(n), np.arange(n)] = deg
    return L


def laplacian_sparse(graph: WeightedGraph, x=None) -> sp.csc_matrix:
    x = as_selection(graph, x)
    n = graph.n
    keep = x != 0
    h, t, w = graph.heads[keep], graph.tails[keep], graph.weights[keep]
    deg = np.bincount(h, weights=w, minlength=n) + np.bincount(t, weights=w, minlength=n)
    rows = np.concatenate([h, t, np.arange(n)])
    cols = np.concatenate([t, h, np.arange(n)])
    vals = np.concatenate([-w, -w, deg])
    return sp.csc_matrix((vals, (rows, cols)), shape=(n, n))


@dataclass(frozen=True)
class SpectralResult:
    lambda2: float
    fiedler: np.ndarray = field(repr=False)
    full_spectrum: Optional[np.ndarray] = field(default=None, repr=False)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    # largest-magnitude entry positive; argmax picks the lowest index on ties
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v


def _clamp(lam: float, scale: float) -> float:
    if abs(lam) <= TOL.zero_clamp * max(1.0, scale):
        return 0.0
    if lam < 0:
        raise NumericalError("negative algebraic connectivity", residual=-lam)
    return float(lam)


def fiedler(L, full_spectrum: bool = False) -> SpectralResult:
    """Algebraic connectivity and unit Fiedler vector of a Laplacian.

    Dense matrices up to ``TOL.dense_max_n`` vertices are handled by LAPACK on
    ``L + s * 11^T / n`` with ``s`` above the spectral radius, which moves the
    constant vector to the top of the spectrum so the smallest eigenpair is
    ``(lambda2, v2)`` with ``v2`` orthogonal to ``1``. Larger or sparse
    inputs use shift-invert Lanczos restricted to the complement of ``1``.
    """
    n = L.shape[0]
    if n < 2:
        raise GraphError("the Fiedler pair needs at least 2 vertices")
    if sp.issparse(L) or n > TOL.dense_max_n:
        if full_spectrum:
            raise GraphError("full_spectrum is only available on the dense path")
        return _fiedler_sparse(sp.csc_matrix(L))

    L = np.asarray(L, dtype=float)
    maxdiag = float(np.max(np.diag(L))) if n else 0.0
    shift = 2.0 * maxdiag + 1.0
    lam, vec = scipy.linalg.eigh(L + shift / n, subset_by_index=[0, 0])
    v = vec[:, 0]
    v = v - v.mean()
    v = _fix_sign(v / np.linalg.norm(v))
    lam = float(v @ L @ v)
    _check_residual(L, lam, v, maxdiag)
    spectrum = np.linalg.eigvalsh(L) if full_spectrum else None
    return SpectralResult(_clamp(lam, maxdiag), v, spectrum)


def _check_residual(M, lam, v, scale):
    res = float(np.linalg.norm(M @ v - lam * v))
    if res > TOL.eig_residual * max(scale, 1.0):
        raise NumericalError("eigenpair did not converge", residual=res)


def _fiedler_sparse(L: sp.csc_matrix) -> SpectralResult:
    n = L.shape[0]
    maxdiag = float(L.diagonal().max())
    eps = 1e-10 * max(maxdiag, 1e-300)
    lu = spla.splu(L + eps * sp.identity(n, format="csc"))

    def project(b):
        return b - b.mean()

    op = spla.LinearOperator((n, n), matvec=lambda b: project(lu.solve(project(np.ravel(b)))), dtype=float)
    v0 = project(np.random.default_rng(0).standard_normal(n))
    try:
        _, vec = spla.eigsh(op, k=1, which="LA", v0=v0, tol=1e-12, maxiter=20 * n)
    except spla.ArpackNoConvergence as exc:
        raise NumericalError("shift-invert Lanczos did not converge") from exc
    v = project(vec[:, 0])
    v = _fix_sign(v / np.linalg.norm(v))
    lam = float(v @ (L @ v))
    _check_residual(L, lam, v, maxdiag)
    return SpectralResult(_clamp(lam, maxdiag), v)


def graph_fiedler(graph: WeightedGraph, x=None) -> SpectralResult:
    """Fiedler pair of the selected subgraph, choosing dense or sparse storage by size."""
    if graph.n > TOL.dense_max_n:
        return fiedler(laplacian_sparse(graph, x))
    return fiedler(laplacian(graph, x))


def algebraic_connectivity(graph: WeightedGraph, x=None) -> float:
    return graph_fiedler(graph, x).lambda2


def smallest_eigenpair(M) -> tuple[float, np.ndarray]:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise GraphError(f"expected a square matrix, got shape {M.shape}")
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    if np.max(np.abs(M - M.T), initial=0.0) > TOL.symmetry * max(scale, 1.0):
        raise GraphError("matrix is not symmetric")
    M = 0.5 * (M + M.T)
    lam, vec = scipy.linalg.eigh(M, subset_by_index=[0, 0])
    v = _fix_sign(vec[:, 0])
    lam = float(lam[0])
    _check_residual(M, lam, v, np.linalg.norm(M, np.inf))
    return lam, v


def lifted_matrix(graph: WeightedGraph, x, gamma: float,
                  base: Optional[WeightedGraph] = None) -> np.ndarray:
    """``W = L_base + L(x) - gamma (I - e0 e0^T)`` with ``e0 = 1/sqrt(n)``.

    ``W`` is PSD exactly when ``gamma`` does not exceed the algebraic
    connectivity of the combined graph.
    """
    n = graph.n
    W = laplacian(graph, x)
    if base is not None:
        if base.n != n:
            raise GraphError(f"base graph has {base.n} vertices, candidates have {n}")
        shared = set(base.index) & set(graph.index)
        if shared:
            raise GraphError(f"base and candidate edges overlap on {sorted(shared)[0]}")
        W += laplacian(base)
    W -= gamma * (np.eye(n) - np.full((n, n), 1.0 / n))
    return W


class UnionFind:
    __slots__ = ("parent", "components")

    def __init__(self, n):
        self.parent = list(range(n))
        self.components = n

    def find(self, u):
        parent = self.parent
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    def union(self, u, v):
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return False
        if ru < rv:
            ru, rv = rv, ru
        self.parent[ru] = rv
        self.components -= 1
        return True


def is_connected(graph: WeightedGraph, x=None, extra: Iterable[Sequence[int]] = ()) -> bool:
    """Connectivity of the selected subgraph (plus any ``extra`` pairs)."""
    x = as_selection(graph, x)
    if graph.n <= 1:
        return True
    uf = UnionFind(graph.n)
    for p in extra:
        uf.union(p[0], p[1])
    for k in np.flatnonzero(x):
        i, j, _ = graph.edges[k]
        if uf.union(i, j) and uf.components == 1:
            return True
    return uf.components == 1
