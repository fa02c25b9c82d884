"""Problem definitions for algebraic-connectivity maximization.

Two variants are supported:

* ``spanning_tree``: pick exactly ``n - 1`` candidate edges forming a tree.
* ``augmentation``: add at most ``q`` candidate edges to a fixed connected
  base graph.

Internally both are handled on the *union graph* (base plus candidate
edges), where base edges are always selected.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .graph import (GraphError, WeightedGraph, as_selection, graph_fiedler, is_connected,
                    laplacian, build_graph)

__all__ = ["Variant", "CheegerMode", "ProblemSpec", "InfeasibleError"]


class InfeasibleError(ValueError):
    """No feasible connected selection exists."""


class Variant(str, enum.Enum):
    SPANNING_TREE = "spanning_tree"
    AUGMENTATION = "augmentation"


@dataclass(frozen=True)
class CheegerMode:
    kind: str = "off"
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in ("off", "safe", "scaled"):
            raise ValueError(f"unknown Cheeger mode {self.kind!r}")
        if self.kind == "scaled" and not 0 < self.alpha <= 1:
            raise ValueError(f"scaled Cheeger mode needs alpha in (0, 1], got {self.alpha}")

    @classmethod
    def parse(cls, text: str) -> "CheegerMode":
        """Accept ``off``, ``safe`` or ``scaled=<alpha>``."""
        if isinstance(text, CheegerMode):
            return text
        if text.startswith("scaled"):
            _, _, a = text.partition("=")
            return cls("scaled", float(a) if a else 1.0)
        return cls(text)

    @property
    def enabled(self) -> bool:
        return self.kind != "off"

    @property
    def aggressive(self) -> bool:
        # only c_f = 1/2 is backed by Cheeger's inequality
        return self.kind == "scaled"

    def __str__(self):
        return f"scaled={self.alpha!r}" if self.kind == "scaled" else self.kind


@dataclass(frozen=True)
class ProblemSpec:
    candidates: WeightedGraph
    variant: Variant = Variant.SPANNING_TREE
    base: Optional[WeightedGraph] = None
    budget: Optional[int] = None
    cheeger_mode: CheegerMode = field(default_factory=CheegerMode)
    eps_opt: float = 1e-4
    max_iter: int = 10_000
    time_limit: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "cheeger_mode", CheegerMode.parse(self.cheeger_mode))
        n = self.candidates.n
        if self.eps_opt <= 0:
            raise ValueError("eps_opt must be positive")
        if self.variant is Variant.SPANNING_TREE:
            if self.base is not None and self.base.m:
                raise ValueError("the spanning-tree variant takes no base edges")
            if self.budget not in (None, n - 1):
                raise ValueError(f"spanning-tree budget is n-1 = {n - 1}, got {self.budget}")
            object.__setattr__(self, "base", None)
            object.__setattr__(self, "budget", n - 1)
            if n < 2:
                raise ValueError("need at least 2 vertices")
        else:
            base = self.base if self.base is not None else WeightedGraph(n)
            object.__setattr__(self, "base", base)
            if base.n != n:
                raise ValueError(f"base graph has {base.n} vertices, candidates have {n}")
            shared = set(base.index) & set(self.candidates.index)
            if shared:
                raise ValueError(f"base and candidate edges overlap on {sorted(shared)[0]}")
            if not is_connected(base):
                raise ValueError("augmentation requires a connected base graph")
            q = self.candidates.m if self.budget is None else int(self.budget)
            object.__setattr__(self, "budget", q)
            if self.candidates.m == 0:
                if q != 0:
                    raise ValueError("no candidate edges, so the budget must be 0")
            elif q < 1:
                raise ValueError(f"budget must be >= 1, got {q}")

    @classmethod
    def spanning_tree(cls, graph: WeightedGraph, **kw) -> "ProblemSpec":
        return cls(graph, Variant.SPANNING_TREE, **kw)

    @classmethod
    def augmentation(cls, base: WeightedGraph, candidates: WeightedGraph, budget: int,
                     **kw) -> "ProblemSpec":
        return cls(candidates, Variant.AUGMENTATION, base, budget, **kw)

    def replace(self, **changes) -> "ProblemSpec":
        from dataclasses import replace
        return replace(self, **changes)

    @property
    def n(self) -> int:
        return self.candidates.n

    @property
    def is_tree(self) -> bool:
        return self.variant is Variant.SPANNING_TREE

    @cached_property
    def union(self) -> WeightedGraph:
        """Base and candidate edges in one canonical graph."""
        if not self.base or not self.base.m:
            return self.candidates
        return build_graph(self.n, list(self.base.edges) + list(self.candidates.edges))

    @cached_property
    def candidate_index(self) -> np.ndarray:
        """Position of each candidate edge inside :attr:`union`."""
        idx = self.union.index
        return np.array([idx[p] for p in self.candidates.pairs()], dtype=np.intp)

    @cached_property
    def base_mask(self) -> np.ndarray:
        mask = np.ones(self.union.m, dtype=bool)
        mask[self.candidate_index] = False
        return mask

    @cached_property
    def base_laplacian(self) -> np.ndarray:
        if self.base is None:
            return np.zeros((self.n, self.n))
        return laplacian(self.base)

    def to_union(self, x) -> np.ndarray:
        """Lift a candidate selection to a selection on :attr:`union`."""
        x = as_selection(self.candidates, x)
        y = self.base_mask.astype(float)
        y[self.candidate_index] = x
        return y

    def from_union(self, y) -> np.ndarray:
        return np.asarray(y, dtype=float)[self.candidate_index].copy()

    def lambda2(self, x) -> float:
        return graph_fiedler(self.union, self.to_union(x)).lambda2

    def is_feasible(self, x) -> bool:
        x = as_selection(self.candidates, x)
        count = int(x.sum())
        if self.is_tree:
            return count == self.n - 1 and is_connected(self.candidates, x)
        return count <= self.budget and is_connected(self.union, self.to_union(x))

    def check_feasible(self, x) -> np.ndarray:
        x = as_selection(self.candidates, x)
        if not self.is_feasible(x):
            raise GraphError(f"selection is infeasible for the {self.variant.value} variant")
        return x

    def selected_pairs(self, x) -> list[tuple[int, int]]:
        x = as_selection(self.candidates, x)
        return [self.candidates.edges[k][:2] for k in np.flatnonzero(x)]

    def describe(self) -> dict:
        return {"variant": self.variant.value, "n": self.n, "candidates": self.candidates.m,
                "base_edges": self.base.m if self.base is not None else 0,
                "budget": self.budget, "cheeger_mode": str(self.cheeger_mode),
                "eps_opt": self.eps_opt, "max_iter": self.max_iter,
                "time_limit": self.time_limit}
