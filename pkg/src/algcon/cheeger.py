"""Cheeger constant (edge expansion) of a weighted graph.

``phi(S) = w(delta(S)) / |S|`` and ``phi(G)`` is its minimum over vertex sets
with ``1 <= |S| <= floor(n/2)``. Two exact routes are provided: exhaustive
enumeration (small graphs, used as an oracle) and a linear MILP in which the
products ``z_i z_j`` and ``phi z_i`` are replaced by exact linearizations.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from . import milp as mi
from .graph import GraphError, WeightedGraph

__all__ = [
    "CheegerResult",
    "CheegerVars",
    "CheegerTimeLimit",
    "CapacityError",
    "BRUTE_FORCE_MAX_N",
    "validate_cut",
    "cheeger_ratio",
    "cheeger_bruteforce",
    "cheeger_upper_bound",
    "build_cheeger_milp",
    "cheeger_milp",
    "cheeger_constant",
]

BRUTE_FORCE_MAX_N = 24
_AUTO_BRUTE_N = 12


class CapacityError(ValueError):
    pass


class CheegerTimeLimit(RuntimeError):
    def __init__(self, bound: float, incumbent: Optional["CheegerResult"] = None):
        super().__init__(f"Cheeger MILP hit its time limit (best bound {bound:.6g})")
        self.bound = bound
        self.incumbent = incumbent


@dataclass(frozen=True)
class CheegerResult:
    phi: float
    cut: tuple[int, ...]
    method: str
    wall_time: float = field(default=0.0, compare=False)


def validate_cut(graph: WeightedGraph, S: Iterable[int]) -> tuple[int, ...]:
    cut = tuple(sorted(set(int(v) for v in S)))
    if not cut:
        raise GraphError("cut set S is empty")
    if len(cut) > graph.n // 2:
        raise GraphError(f"|S| = {len(cut)} exceeds floor(n/2) = {graph.n // 2}")
    if cut[0] < 0 or cut[-1] >= graph.n:
        raise GraphError(f"cut set {cut} has vertices outside 0..{graph.n - 1}")
    return cut


def cheeger_ratio(graph: WeightedGraph, S: Iterable[int], x=None) -> float:
    """Weight of the edges leaving ``S`` divided by ``|S|`` (optionally on a selection ``x``)."""
    cut = validate_cut(graph, S)
    inside = np.zeros(graph.n, dtype=bool)
    inside[list(cut)] = True
    crossing = inside[graph.heads] != inside[graph.tails]
    w = graph.weights if x is None else graph.weights * np.asarray(x, dtype=float)
    return math.fsum(w[crossing]) / len(cut)


def cheeger_upper_bound(graph: WeightedGraph) -> float:
    """Minimum weighted degree, i.e. the ratio of the best singleton cut."""
    if graph.n < 2:
        raise GraphError("the Cheeger constant needs at least 2 vertices")
    deg = np.zeros(graph.n)
    np.add.at(deg, graph.heads, graph.weights)
    np.add.at(deg, graph.tails, graph.weights)
    return float(deg.min())


def cheeger_bruteforce(graph: WeightedGraph, chunk: int = 1 << 16) -> CheegerResult:
    """Enumerate every admissible ``S``; ties go to smaller ``|S|`` then lexicographically smaller ``S``."""
    n = graph.n
    if n < 2:
        raise GraphError("the Cheeger constant needs at least 2 vertices")
    if n > BRUTE_FORCE_MAX_N:
        raise CapacityError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    t0 = time.perf_counter()
    half = n // 2
    bits = (1 << np.arange(n, dtype=np.int64))
    h, t, w = graph.heads, graph.tails, graph.weights
    best = math.inf
    ties: list[tuple[int, tuple[int, ...]]] = []
    for start in range(1, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        member = (masks[:, None] & bits) != 0
        size = member.sum(axis=1)
        ok = size <= half
        if not ok.any():
            continue
        masks, member, size = masks[ok], member[ok], size[ok]
        if graph.m:
            cutw = (member[:, h] != member[:, t]) @ w
        else:
            cutw = np.zeros(len(masks))
        ratio = cutw / size
        lo = ratio.min()
        if lo > best * (1 + 1e-12) + 1e-15:
            continue
        if lo < best:
            best = float(lo)
            ties = [entry for entry in ties if entry[0] <= best * (1 + 1e-12) + 1e-15]
        thresh = best * (1 + 1e-12) + 1e-15
        for k in np.flatnonzero(ratio <= thresh):
            S = tuple(int(v) for v in np.flatnonzero(member[k]))
            ties.append((float(ratio[k]), S))
    best = min(r for r, _ in ties)
    thresh = best * (1 + 1e-12) + 1e-15
    S = min((S for r, S in ties if r <= thresh), key=lambda S: (len(S), S))
    return CheegerResult(cheeger_ratio(graph, S), S, "brute_force", time.perf_counter() - t0)


@dataclass
class CheegerVars:
    phi: mi.VarId
    z: list[mi.VarId]
    zhat: dict[tuple[int, int], mi.VarId]
    phiz: list[mi.VarId]


def build_cheeger_milp(graph: WeightedGraph, phi_bar: Optional[float] = None):
    """MILP whose optimum is the Cheeger constant.

    ``zhat_ij`` stands for ``z_i z_j`` (exact on binaries through its convex
    hull) and ``phiz_i`` for ``phi z_i`` (McCormick envelope with
    ``0 <= phi <= phi_bar``). Returns ``(model, CheegerVars)``.
    """
    n = graph.n
    if n < 2:
        raise GraphError("the Cheeger constant needs at least 2 vertices")
    if phi_bar is None:
        phi_bar = cheeger_upper_bound(graph)
    model = mi.new_model(mi.Sense.MINIMIZE)
    phi = model.add_variable(mi.VarKind.CONTINUOUS, 0.0, phi_bar, "phi")
    z = [model.add_variable(mi.VarKind.BINARY, name=f"z[{i}]") for i in range(n)]
    zhat = {(i, j): model.add_variable(mi.VarKind.CONTINUOUS, 0.0, 1.0, f"Z[{i},{j}]")
            for i, j, _ in graph.edges}
    phiz = [model.add_variable(mi.VarKind.CONTINUOUS, 0.0, phi_bar, f"phiz[{i}]") for i in range(n)]

    # sum_i phiz_i >= sum_ij w_ij (z_i + z_j - 2 zhat_ij)
    row: dict[mi.VarId, float] = {p: 1.0 for p in phiz}
    for i, j, w in graph.edges:
        row[z[i]] = row.get(z[i], 0.0) - w
        row[z[j]] = row.get(z[j], 0.0) - w
        row[zhat[i, j]] = 2.0 * w
    model.add_constraint(row, ">=", 0.0, "cut_ratio")
    for (i, j), Z in zhat.items():
        model.add_constraint([(Z, 1.0), (z[i], -1.0)], "<=", 0.0, f"zhat_ub_i[{i},{j}]")
        model.add_constraint([(Z, 1.0), (z[j], -1.0)], "<=", 0.0, f"zhat_ub_j[{i},{j}]")
        model.add_constraint([(Z, 1.0), (z[i], -1.0), (z[j], -1.0)], ">=", -1.0, f"zhat_lb[{i},{j}]")
    for i in range(n):
        model.add_constraint([(phiz[i], 1.0), (phi, -1.0), (z[i], -phi_bar)], ">=", -phi_bar,
                             f"phiz_lb[{i}]")
        model.add_constraint([(phiz[i], 1.0), (phi, -1.0)], "<=", 0.0, f"phiz_ub_phi[{i}]")
        model.add_constraint([(phiz[i], 1.0), (z[i], -phi_bar)], "<=", 0.0, f"phiz_ub_z[{i}]")
    model.add_constraint([(v, 1.0) for v in z], ">=", 1.0, "size_lb")
    model.add_constraint([(v, 1.0) for v in z], "<=", float(n // 2), "size_ub")
    model.set_objective({phi: 1.0})
    return model, CheegerVars(phi, z, zhat, phiz)


def cheeger_milp(graph: WeightedGraph, backend=None, time_limit: float = math.inf,
                 rel_gap: float = 1e-9) -> CheegerResult:
    t0 = time.perf_counter()
    model, v = build_cheeger_milp(graph)
    sol = mi.solve(model, mi.SolveLimits(time_limit=time_limit, rel_gap=rel_gap), backend)
    if sol.status is mi.Status.TIME_LIMIT:
        inc = None
        if sol.values:
            S = [i for i, zi in enumerate(v.z) if sol[zi] > 0.5]
            if 1 <= len(S) <= graph.n // 2:
                inc = CheegerResult(cheeger_ratio(graph, S), tuple(S), "milp", time.perf_counter() - t0)
        raise CheegerTimeLimit(sol.bound, inc)
    if not sol.optimal:
        raise RuntimeError(f"Cheeger MILP ended with status {sol.status.value}: {sol.message}")
    S = [i for i, zi in enumerate(v.z) if sol[zi] > 0.5]
    return CheegerResult(cheeger_ratio(graph, S), tuple(S), "milp", time.perf_counter() - t0)


def cheeger_constant(graph: WeightedGraph, backend=None, force_method: Optional[str] = None,
                     time_limit: float = math.inf) -> CheegerResult:
    """Exact Cheeger constant.

    ``force_method`` is ``"milp"``, ``"brute_force"`` or ``None``. Without it
    the MILP is used, falling back to enumeration for ``n <= 12`` when no
    backend is available.
    """
    if force_method in ("brute", "brute_force"):
        return cheeger_bruteforce(graph)
    if force_method not in (None, "milp"):
        raise ValueError(f"unknown Cheeger method {force_method!r}")
    resolved = mi.get_backend(backend) if backend is None or isinstance(backend, str) else backend
    if resolved is None:
        if force_method is None and graph.n <= _AUTO_BRUTE_N:
            return cheeger_bruteforce(graph)
        raise RuntimeError(f"MILP backend {backend!r} is not available")
    return cheeger_milp(graph, resolved, time_limit)
