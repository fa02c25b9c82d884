"""Exact algebraic-connectivity maximization by outer approximation.

The semidefinite constraint ``W(x, gamma) = L(x) - gamma (I - e0 e0^T) >= 0``
is dropped and replaced by linear cuts accumulated in a MILP master problem:

* eigenvector cuts ``v.W(x, gamma) v >= 0`` for the most negative eigenvector
  ``v`` of ``W`` at the current master solution;
* Cheeger cuts ``w(delta(S) & x) >= c_f * lambda2_hat * |S|``, where ``S`` is
  the sparsest normalized cut of the master's graph and ``lambda2_hat`` the
  best known feasible connectivity.

The master is re-solved from scratch each iteration with all cuts so far.
Two further families of eigenvector cuts (valid for any vector) speed this
up: cuts from vertex-set indicator vectors added up front on small graphs,
and cuts from the Fiedler vectors of selections near the master solution.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import time
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import milp as mi
from .cheeger import CheegerTimeLimit, cheeger_constant, validate_cut
from .graph import (UnionFind, WeightedGraph, graph_fiedler, laplacian, lifted_matrix,
                    smallest_eigenpair)
from .jsonutil import clean
from .heuristics import HeuristicConfig, heuristic_solve
from .problem import InfeasibleError, ProblemSpec
from .settings import TOL

__all__ = [
    "Cut",
    "MasterVars",
    "OaResult",
    "OaConfig",
    "CapacityError",
    "set_vectors",
    "gamma_upper_bound",
    "build_master",
    "eigenvector_cut",
    "cheeger_cut",
    "solve_oa",
    "brute_force_optimum",
    "prufer_trees",
]

logger = logging.getLogger(__name__)

CHEEGER_SUB_TIME_LIMIT = 30.0


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class Cut:
    """``coeffs . x + gamma_coef * gamma >= rhs`` over the candidate edges."""

    kind: str
    coeffs: np.ndarray
    gamma_coef: float
    rhs: float

    def lhs(self, x, gamma: float = 0.0) -> float:
        return float(self.coeffs @ np.asarray(x, dtype=float) + self.gamma_coef * gamma)

    def violation(self, x, gamma: float = 0.0) -> float:
        return self.rhs - self.lhs(x, gamma)

    def satisfied(self, x, gamma: float = 0.0, tol: float = 1e-9) -> bool:
        return self.violation(x, gamma) <= tol

    def add_to(self, model: mi.MilpModel, xs, gamma_var) -> mi.ConId:
        expr = [(xv, c) for xv, c in zip(xs, self.coeffs) if c != 0.0]
        if self.gamma_coef != 0.0:
            expr.append((gamma_var, self.gamma_coef))
        return model.add_constraint(expr, ">=", self.rhs, name=f"{self.kind}_{model.num_constraints}")


@dataclass
class MasterVars:
    x: list[mi.VarId]
    gamma: mi.VarId
    flow: dict[tuple[int, int], mi.VarId] = field(default_factory=dict)


@dataclass
class OaResult:
    incumbent: np.ndarray
    lb: float
    ub: float
    gap: float
    iterations: int
    eig_cuts: int
    cheeger_cuts: int
    status: str
    log: list[dict] = field(default_factory=list)
    wall_time: float = 0.0
    heuristic_lambda2: Optional[float] = None
    aggressive: bool = False
    local_cuts: int = 0
    seed_cuts: int = 0
    cuts: list = field(default_factory=list, repr=False)

    def to_dict(self, spec: Optional[ProblemSpec] = None) -> dict:
        out = {"status": self.status, "lb": self.lb, "ub": self.ub, "gap": self.gap,
               "iterations": self.iterations, "eig_cuts": self.eig_cuts,
               "cheeger_cuts": self.cheeger_cuts, "local_cuts": self.local_cuts,
               "seed_cuts": self.seed_cuts, "wall_time": self.wall_time,
               "heuristic_lambda2": self.heuristic_lambda2, "aggressive": self.aggressive,
               "incumbent": [int(b) for b in self.incumbent]}
        if spec is not None:
            out["selection"] = [list(p) for p in spec.selected_pairs(self.incumbent)]
        return out


def _relative_gap(ub: float, lb: float) -> float:
    return (ub - lb) / (ub + 1e-6)


def gamma_upper_bound(spec: ProblemSpec) -> float:
    """Connectivity with every base and candidate edge selected."""
    res = graph_fiedler(spec.union)
    if res.lambda2 <= TOL.connected_lambda:
        raise InfeasibleError("base plus candidate edges do not connect the graph")
    return res.lambda2


def build_master(spec: ProblemSpec, tree_rows: str = "flow"):
    """Master MILP without the semidefinite constraint: ``max gamma``.

    ``gamma`` is bounded by :func:`gamma_upper_bound`. The tree variant adds
    ``sum x = n - 1`` and either a single-commodity flow from vertex 0 (one
    unit delivered to every other vertex, arc capacity ``(n - 1) x_ij``;
    ``tree_rows="flow"``) or every subtour-elimination row
    ``x(E(S)) <= |S| - 1`` for ``3 <= |S| < n`` (``"subtour"``). The
    augmentation variant adds ``sum x <= q``.
    """
    if tree_rows not in ("flow", "subtour"):
        raise ValueError(f"tree_rows must be 'flow' or 'subtour', got {tree_rows!r}")
    gbar = gamma_upper_bound(spec)
    G = spec.candidates
    n = spec.n
    model = mi.new_model(mi.Sense.MAXIMIZE)
    xs = [model.add_variable(mi.VarKind.BINARY, name=f"x[{i},{j}]") for i, j, _ in G.edges]
    gamma = model.add_variable(mi.VarKind.CONTINUOUS, 0.0, gbar, "gamma")
    mv = MasterVars(xs, gamma)
    if spec.is_tree:
        model.add_constraint([(v, 1.0) for v in xs], "=", float(n - 1), "tree_size")
        if tree_rows == "subtour":
            _subtour_rows(model, xs, G)
            model.set_objective({gamma: 1.0})
            return model, mv
        cap = float(n - 1)
        for k, (i, j, _) in enumerate(G.edges):
            for a, b in ((i, j), (j, i)):
                f = model.add_variable(mi.VarKind.CONTINUOUS, 0.0, cap, f"f[{a},{b}]")
                mv.flow[a, b] = f
                model.add_constraint([(f, 1.0), (xs[k], -cap)], "<=", 0.0, f"cap[{a},{b}]")
        for v in range(1, n):
            expr = [(f, 1.0) for (a, b), f in mv.flow.items() if b == v]
            expr += [(f, -1.0) for (a, b), f in mv.flow.items() if a == v]
            model.add_constraint(expr, "=", 1.0, f"demand[{v}]")
    elif xs:
        model.add_constraint([(v, 1.0) for v in xs], "<=", float(spec.budget), "budget")
    model.set_objective({gamma: 1.0})
    return model, mv


def _subtour_rows(model, xs, G: WeightedGraph) -> None:
    n = G.n
    bits = 1 << np.arange(n)
    for mask in range(1, 1 << n):
        size = bin(mask).count("1")
        if not 3 <= size < n:
            continue
        inside = (mask & bits) != 0
        ks = np.flatnonzero(inside[G.heads] & inside[G.tails])
        if len(ks) > size - 1:
            model.add_constraint([(xs[k], 1.0) for k in ks], "<=", float(size - 1),
                                 f"subtour[{mask}]")


def eigenvector_cut(spec: ProblemSpec, v) -> Cut:
    """Linear cut ``v . W(x, gamma) v >= 0`` expanded in ``(x, gamma)``."""
    v = np.asarray(v, dtype=float)
    G = spec.candidates
    coeffs = G.weights * (v[G.heads] - v[G.tails]) ** 2
    gamma_coef = -(float(v @ v) - float(v.sum()) ** 2 / spec.n)
    rhs = 0.0
    if spec.base is not None and spec.base.m:
        B = spec.base
        rhs = -float(np.sum(B.weights * (v[B.heads] - v[B.tails]) ** 2))
    return Cut("eig", coeffs, gamma_coef, rhs)


def cheeger_cut(S, lambda2_hat: float, c_f: float, spec: ProblemSpec) -> Cut:
    """Cut ``sum_{delta(S)} w_ij x_ij >= c_f * lambda2_hat * |S|``; base edges enter the rhs."""
    G = spec.candidates
    S = validate_cut(G, S)
    inside = np.zeros(spec.n, dtype=bool)
    inside[list(S)] = True
    crossing = inside[G.heads] != inside[G.tails]
    coeffs = np.where(crossing, G.weights, 0.0)
    rhs = c_f * lambda2_hat * len(S)
    if spec.base is not None and spec.base.m:
        B = spec.base
        rhs -= float(np.sum(B.weights[inside[B.heads] != inside[B.tails]]))
    return Cut("cheeger", coeffs, 0.0, rhs)


def _selection_graph(spec: ProblemSpec, x):
    """Union graph restricted to base plus selected candidates, as a WeightedGraph."""
    y = spec.to_union(x)
    U = spec.union
    return WeightedGraph(spec.n, tuple(e for e, keep in zip(U.edges, y) if keep))


@dataclass(frozen=True)
class OaConfig:
    """Tuning knobs of :func:`solve_oa`; none of them affects correctness.

    ``master``: ``"target"`` pins gamma just above the incumbent so every
    master solve is a feasibility search (any admissible selection beats the
    incumbent), ``"optimize"`` maximizes gamma each time. ``local_cuts`` caps
    the extra eigenvector cuts generated per iteration from edge-exchange
    neighbors of the master solution. ``set_cuts_max_n``: up to this many
    vertices, the master starts with the eigenvector cuts of all vertex-set
    indicator vectors and ``tree_rows="auto"`` switches the tree constraints
    from a flow to all subtour-elimination rows. ``harvest_steps`` bounds a
    tabu walk that collects further admitted selections (and their cuts)
    after each master solve. ``warm_start`` seeds the incumbent (and the Cheeger
    reference value) from the k-opt heuristic in every mode, so runs with and
    without Cheeger cuts start from the same point.
    """

    warm_start: bool = True
    master: str = "target"
    local_cuts: int = 200
    harvest_steps: int = 300
    tree_rows: str = "auto"
    set_cuts_max_n: int = 10
    target_margin: float = 0.5
    master_rel_gap: float = 1e-6
    heuristic: HeuristicConfig = HeuristicConfig(k=1, m=20)
    cheeger_method: str = "milp"
    cheeger_time_limit: float = CHEEGER_SUB_TIME_LIMIT

    def __post_init__(self):
        if self.master not in ("target", "optimize"):
            raise ValueError(f"master must be 'target' or 'optimize', got {self.master!r}")
        if not 0 <= self.target_margin < 1:
            raise ValueError("target_margin must lie in [0, 1)")
        if self.local_cuts < 0 or self.harvest_steps < 0:
            raise ValueError("local_cuts and harvest_steps must be >= 0")
        if self.tree_rows not in ("auto", "flow", "subtour"):
            raise ValueError(f"tree_rows must be 'auto', 'flow' or 'subtour', got {self.tree_rows!r}")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["heuristic"] = asdict(self.heuristic)
        return d


def set_vectors(n: int) -> list[np.ndarray]:
    """Unit vectors ``1_S - |S|/n`` for every vertex set with ``|S| <= n/2``."""
    out = []
    for size in range(1, n // 2 + 1):
        for S in itertools.combinations(range(n), size):
            if 2 * size == n and 0 not in S:
                continue  # complement already listed
            v = np.full(n, -size / n)
            v[list(S)] += 1.0
            out.append(v / np.linalg.norm(v))
    return out


def solve_oa(spec: ProblemSpec, backend=None, config: OaConfig = OaConfig(), *,
             log_path=None) -> OaResult:
    """Outer-approximation loop; stops once ``(UB - LB) / (UB + 1e-6) <= spec.eps_opt``.

    Each iteration solves the master, evaluates ``lambda2`` of its selection,
    adds the eigenvector cut of the lifted matrix when it is not PSD and, with
    a Cheeger mode, a Cheeger cut when the selection's Cheeger constant is
    below ``c_f * lambda2_hat``. Cuts are never removed.
    """
    t0 = time.perf_counter()
    deadline = t0 + spec.time_limit
    if backend is None or isinstance(backend, str):
        name = backend
        backend = mi.get_backend(backend)
        if backend is None:
            raise RuntimeError(f"MILP backend {name!r} is not available")
    cfg = config
    mode = spec.cheeger_mode
    warm_start = cfg.warm_start
    ch_method = None if cfg.cheeger_method in (None, "auto") else cfg.cheeger_method

    tree_rows = cfg.tree_rows
    if tree_rows == "auto":
        tree_rows = "subtour" if spec.n <= cfg.set_cuts_max_n else "flow"
    model, mv = build_master(spec, tree_rows)
    gvar = model.variables[mv.gamma.index]
    gbar = gvar.upper
    pool: list[Cut] = []

    def add(cut):
        pool.append(cut)
        cut.add_to(model, mv.x, mv.gamma)

    seed_cuts = 0
    if spec.n <= cfg.set_cuts_max_n:
        for v in set_vectors(spec.n):
            cut = eigenvector_cut(spec, v)
            if np.any(cut.coeffs):
                add(Cut("set", cut.coeffs, cut.gamma_coef, cut.rhs))
                seed_cuts += 1

    incumbent = None
    LB, UB = 0.0, gbar
    lam_hat, heur_lam = 0.0, None
    hat_sel, phi_hat = None, None
    if warm_start:
        h = heuristic_solve(spec, cfg.heuristic)
        incumbent, LB, lam_hat, heur_lam = h.selection, h.lambda2, h.lambda2, h.lambda2

    def floor_of(lb):
        return lb * (1 + cfg.target_margin * spec.eps_opt)

    log: list[dict] = []
    eig_cuts = cheeger_cuts = local_cuts = 0
    status = "IterLimit"
    iterations = 0

    while iterations < spec.max_iter:
        remaining = deadline - time.perf_counter()
        if remaining <= 0:
            status = "TimeLimit"
            break
        pinned = cfg.master == "target" and LB > 0
        if LB > 0:
            # selections that cannot beat the incumbent are of no interest
            gvar.lower = floor_of(LB) if pinned else LB * (1 - 1e-9)
        if pinned:
            gvar.upper = gvar.lower
        sol = mi.solve(model, mi.SolveLimits(time_limit=remaining, rel_gap=cfg.master_rel_gap),
                       backend)
        iterations += 1
        if sol.status is mi.Status.TIME_LIMIT:
            if math.isfinite(sol.bound) and not pinned:
                UB = max(LB, min(UB, sol.bound))
            status = "TimeLimit"
            break
        if sol.status is mi.Status.INFEASIBLE:
            if incumbent is None:
                raise InfeasibleError("master problem is infeasible")
            # nothing admissible at or above the floor, so the floor bounds gamma*
            UB = max(LB, min(UB, gvar.lower))
            log.append({"iter": iterations, "gamma_u": None, "ub": UB, "lb": LB,
                        "lambda2": None, "phi": None, "cuts": [], "local_cuts": 0,
                        "master_status": "Infeasible", "master_time": sol.wall_time,
                        "time": time.perf_counter() - t0})
            status = "Optimal" if _relative_gap(UB, LB) <= spec.eps_opt else "GapLimit"
            break
        if not sol.optimal:
            raise RuntimeError(f"master solve failed at iteration {iterations}: "
                               f"{sol.status.value} {sol.message}")

        gamma_u = sol[mv.gamma]
        x_t = np.round(sol.array(mv.x))
        if not pinned:
            bound = sol.bound if math.isfinite(sol.bound) else sol.objective
            UB = min(UB, max(bound, gamma_u))
        lam_t = spec.lambda2(x_t)
        improved = incumbent is None or lam_t > LB
        if improved:
            incumbent, LB = x_t, lam_t
        lam_hat = max(lam_hat, LB)
        UB = max(UB, LB)
        entry = {"iter": iterations, "gamma_u": gamma_u, "ub": UB, "lb": LB, "lambda2": lam_t,
                 "phi": None, "cuts": [], "local_cuts": 0, "master_time": sol.wall_time}
        log.append(entry)
        if _relative_gap(UB, LB) <= spec.eps_opt:
            status = "Optimal"
            entry["time"] = time.perf_counter() - t0
            break

        W = lifted_matrix(spec.candidates, x_t, gamma_u, spec.base)
        lam_min, v = smallest_eigenpair(W)
        entry["lambda_min"] = lam_min
        if lam_min < -TOL.psd_violation * max(1.0, float(np.linalg.norm(W, np.inf))):
            add(eigenvector_cut(spec, v))
            eig_cuts += 1
            entry["cuts"].append("eig")

        if cfg.local_cuts and entry["cuts"]:
            added, best = _local_cuts(spec, add, pool, x_t, floor_of(LB), gbar, cfg.local_cuts)
            local_cuts += added
            entry["local_cuts"] = added
            if best is not None and best[1] > LB:
                incumbent, LB = best
                lam_hat = max(lam_hat, LB)
                improved = True
        if cfg.harvest_steps and entry["cuts"]:
            added, best = _harvest(spec, add, pool, x_t, floor_of(LB), gbar, cfg.harvest_steps)
            local_cuts += added
            entry["harvest_cuts"] = added
            if best is not None and best[1] > LB:
                incumbent, LB = best
                lam_hat = max(lam_hat, LB)
                improved = True

        if mode.enabled and lam_hat > 0:
            try:
                ch = cheeger_constant(_selection_graph(spec, x_t), backend, ch_method,
                                      time_limit=min(cfg.cheeger_time_limit, max(remaining, 1e-3)))
            except CheegerTimeLimit:
                ch = None
                entry["cheeger_timeout"] = True
            if ch is not None:
                entry["phi"] = ch.phi
                if mode.kind == "safe":
                    c_f = 0.5
                else:
                    if hat_sel is not incumbent:
                        hat_sel = incumbent
                        phi_hat = cheeger_constant(_selection_graph(spec, incumbent), backend,
                                                   ch_method).phi
                    c_f = mode.alpha * phi_hat / lam_hat
                if ch.phi < c_f * lam_hat:
                    add(cheeger_cut(ch.cut, lam_hat, c_f, spec))
                    cheeger_cuts += 1
                    entry["cuts"].append("cheeger")
                    entry["c_f"] = c_f

        entry["time"] = time.perf_counter() - t0
        if not entry["cuts"] and not improved:
            # W is PSD to tolerance yet the gap is open: numerical stall
            status = "GapLimit"
            break

    result = OaResult(incumbent if incumbent is not None else np.zeros(spec.candidates.m),
                      LB, UB, _relative_gap(UB, LB), iterations, eig_cuts + local_cuts,
                      cheeger_cuts, status, log, time.perf_counter() - t0, heur_lam,
                      mode.aggressive, local_cuts, seed_cuts, pool)
    if log_path is not None:
        with open(log_path, "w") as fh:
            json.dump(clean({"schema": "algcon-oa-log/v1", "spec": spec.describe(),
                             "config": cfg.as_dict(), "result": result.to_dict(spec), "log": log}),
                      fh, indent=1, allow_nan=False)
    return result


def _gamma_room(cuts, X, gbar):
    """Largest gamma each row of ``X`` admits under ``cuts`` (capped at ``gbar``)."""
    room = np.full(len(X), gbar)
    for c in cuts:
        lhs = X @ c.coeffs - c.rhs
        if c.gamma_coef < 0:
            room = np.minimum(room, lhs / -c.gamma_coef)
        else:
            room = np.where(lhs < -1e-9, -np.inf, room)
    return room


def _exchange_neighbors(spec, x):
    """Feasible selections one edge exchange (or one addition under a slack budget) away."""
    G = spec.candidates
    sel = np.flatnonzero(x)
    out = np.flatnonzero(x == 0)
    found = []
    if spec.is_tree:
        for d in sel:
            uf = UnionFind(spec.n)
            for k in sel:
                if k != d:
                    uf.union(int(G.heads[k]), int(G.tails[k]))
            for a in out:
                if uf.find(int(G.heads[a])) != uf.find(int(G.tails[a])):
                    y = x.copy()
                    y[d], y[a] = 0.0, 1.0
                    found.append(y)
    else:
        # the base graph is connected, so every exchange stays feasible
        for a in out:
            if len(sel) < spec.budget:
                y = x.copy()
                y[a] = 1.0
                found.append(y)
            for d in sel:
                y = x.copy()
                y[d], y[a] = 0.0, 1.0
                found.append(y)
    return np.array(found).reshape(-1, G.m)


def _local_cuts(spec, add, pool, x, floor, gbar, limit):
    """Breadth-first search over edge exchanges inside the region the cuts still admit.

    Every selection reached whose admissible gamma exceeds the floor gets the
    cut of its own Fiedler vector, which limits it to its true ``lambda2``.
    Returns ``(cuts added, best (x, lambda2) seen or None)``.
    """
    seen = {x.tobytes()}
    queue = deque([x])
    added, best = 0, None
    while queue and added < limit:
        X = np.array([y for y in _exchange_neighbors(spec, queue.popleft())
                      if y.tobytes() not in seen]).reshape(-1, spec.candidates.m)
        if not len(X):
            continue
        room = _gamma_room(pool, X, gbar)
        start = len(pool)
        for k in np.argsort(-room, kind="stable"):
            seen.add(X[k].tobytes())
            if best is not None and best[1] * (1 + 1e-12) > floor:
                floor = best[1]
            if added >= limit or room[k] <= floor:
                break
            if len(pool) > start:
                # cuts from this batch may already exclude it
                room[k] = min(room[k], _gamma_room(pool[start:], X[k:k + 1], gbar)[0])
                if room[k] <= floor:
                    continue
            res = graph_fiedler(spec.union, spec.to_union(X[k]))
            if best is None or res.lambda2 > best[1]:
                best = (X[k], res.lambda2)
            if res.lambda2 < room[k] * (1 - 1e-9):
                add(eigenvector_cut(spec, res.fiedler))
                added += 1
                queue.append(X[k])
    return added, best


class _CutMatrix:
    """Dense view of the eigenvector-type cuts for fast admissible-gamma queries."""

    def __init__(self, cuts, gbar):
        rows = [c for c in cuts if c.gamma_coef < 0]
        self.A = np.array([c.coeffs for c in rows]).reshape(len(rows), -1)
        self.b = np.array([c.rhs for c in rows])
        self.g = np.array([-c.gamma_coef for c in rows])
        self.hard = [c for c in cuts if c.gamma_coef >= 0]
        self.gbar = gbar

    def extend(self, cut):
        if cut.gamma_coef < 0:
            self.A = np.vstack([self.A.reshape(-1, len(cut.coeffs)), cut.coeffs])
            self.b = np.append(self.b, cut.rhs)
            self.g = np.append(self.g, -cut.gamma_coef)
        else:
            self.hard.append(cut)

    def room(self, X):
        room = np.full(len(X), self.gbar)
        if len(self.b):
            room = np.minimum(room, ((X @ self.A.T - self.b) / self.g).min(axis=1))
        for c in self.hard:
            room = np.where(X @ c.coeffs - c.rhs < -1e-9, -np.inf, room)
        return room


def _harvest(spec, add, pool, x, floor, gbar, steps):
    """Tabu walk over edge exchanges that climbs the gamma the cuts admit.

    Selections whose admissible gamma exceeds the floor are evaluated and cut
    off by their own Fiedler vector, which saves master solves that would
    otherwise return them one at a time.
    """
    cm = _CutMatrix(pool, gbar)
    seen = {x.tobytes()}
    y = x
    added, best = 0, None
    for _ in range(steps):
        X = np.array([z for z in _exchange_neighbors(spec, y)
                      if z.tobytes() not in seen]).reshape(-1, spec.candidates.m)
        if not len(X):
            break
        room = cm.room(X)
        k = int(np.argmax(room))
        y = X[k]
        seen.add(y.tobytes())
        if room[k] <= floor:
            continue
        res = graph_fiedler(spec.union, spec.to_union(y))
        if best is None or res.lambda2 > best[1]:
            best = (y, res.lambda2)
            floor = max(floor, res.lambda2)
        if res.lambda2 < room[k] * (1 - 1e-9):
            cut = eigenvector_cut(spec, res.fiedler)
            add(cut)
            cm.extend(cut)
            added += 1
    return added, best


def prufer_trees(n: int, batch: int = 1 << 14):
    """Yield ``(B, n-1, 2)`` arrays of tree edges, one row per Prüfer sequence.

    Sequences are visited in lexicographic order.
    """
    if n < 2:
        return
    if n == 2:
        yield np.array([[[0, 1]]])
        return
    total = n ** (n - 2)
    powers = n ** np.arange(n - 3, -1, -1)
    for start in range(0, total, batch):
        codes = np.arange(start, min(start + batch, total))
        seq = (codes[:, None] // powers) % n
        B = len(codes)
        deg = np.ones((B, n), dtype=np.int64)
        np.add.at(deg, (np.repeat(np.arange(B), n - 2), seq.ravel()), 1)
        edges = np.empty((B, n - 1, 2), dtype=np.int64)
        rows = np.arange(B)
        for step in range(n - 2):
            leaf = np.argmax(deg == 1, axis=1)
            edges[:, step, 0] = leaf
            edges[:, step, 1] = seq[:, step]
            deg[rows, leaf] = 0
            deg[rows, seq[:, step]] -= 1
        rest = np.argsort(deg != 1, axis=1, kind="stable")[:, :2]
        edges[:, n - 2] = rest
        yield np.sort(edges, axis=2)


def brute_force_optimum(spec: ProblemSpec, max_trees_n: int = 9, max_subsets: int = 10 ** 6):
    """Exhaustive maximizer ``(selection, lambda2)``; the first maximizer in enumeration order wins."""
    G = spec.candidates
    n = spec.n
    if spec.is_tree:
        if n > max_trees_n:
            raise CapacityError(f"tree enumeration limited to n <= {max_trees_n}, got {n}")
        Wm = G.weight_matrix()
        best_val, best_edges = -math.inf, None
        for edges in prufer_trees(n):
            a, b = edges[..., 0], edges[..., 1]
            w = Wm[a, b]
            ok = np.all(w > 0, axis=1)
            if not ok.any():
                continue
            edges, a, b, w = edges[ok], a[ok], b[ok], w[ok]
            B = len(edges)
            L = np.zeros((B, n, n))
            r = np.repeat(np.arange(B), n - 1)
            a, b, w = a.ravel(), b.ravel(), w.ravel()
            np.add.at(L, (r, a, b), -w)
            np.add.at(L, (r, b, a), -w)
            np.add.at(L, (r, a, a), w)
            np.add.at(L, (r, b, b), w)
            lam = np.linalg.eigvalsh(L)[:, 1]
            k = int(np.argmax(lam))
            if lam[k] > best_val:
                best_val, best_edges = float(lam[k]), edges[k]
        if best_edges is None:
            raise InfeasibleError("no spanning tree uses only candidate edges")
        x = np.zeros(G.m)
        for i, j in best_edges:
            x[G.index[int(i), int(j)]] = 1.0
        return x, spec.lambda2(x)

    q = min(spec.budget, G.m)
    count = math.comb(G.m, q)
    if count > max_subsets:
        raise CapacityError(f"{count} subsets exceed the enumeration guard of {max_subsets}")
    L0 = spec.base_laplacian
    best_val, best = -math.inf, None
    for combo in itertools.combinations(range(G.m), q):
        x = np.zeros(G.m)
        x[list(combo)] = 1.0
        lam = np.linalg.eigvalsh(L0 + laplacian(G, x))[1]
        if lam > best_val:
            best_val, best = float(lam), x
    return best, spec.lambda2(best)
