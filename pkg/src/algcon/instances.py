"""Random instances and file formats.

Random weights come from ``numpy.random.default_rng(seed)`` (PCG64); each
weight is ``1 - rng.random()``, i.e. uniform on ``(0, 1]``.

File formats:

* instance JSON: ``{"format": "algcon-instance", "n": ..., "edges": [[i, j, w], ...],
  "base_edges": [...], "metadata": {...}}``. ``edges`` are the selectable
  candidates, ``base_edges`` (optional) the fixed base graph.
* edge-list CSV: one ``i,j,w`` per line, optional ``i,j,w`` header, optional
  ``# n=<count>`` comment line.
* 2D pose graphs in the g2o text convention (``VERTEX_SE2`` / ``EDGE_SE2``).
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
import warnings
from pathlib import Path
from typing import Optional

import numpy as np

from .graph import GraphError, WeightedGraph, build_graph, is_connected
from .problem import ProblemSpec, Variant

__all__ = [
    "GENERATOR",
    "ParseError",
    "generate_instance",
    "generate_augmentation_instance",
    "parse_edgelist",
    "write_edgelist",
    "load_instance",
    "save_instance",
    "parse_posegraph",
    "load_problem",
]

logger = logging.getLogger(__name__)

GENERATOR = "numpy.random.default_rng(seed) [PCG64]; weights = 1 - rng.random()"


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def _random_tree(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    perm = rng.permutation(n)
    pairs = []
    for k in range(1, n):
        parent = perm[int(rng.integers(0, k))]
        a, b = int(perm[k]), int(parent)
        pairs.append((min(a, b), max(a, b)))
    return pairs


def generate_instance(n: int, density: float = 1.0, seed: int = 0) -> WeightedGraph:
    """Connected random graph keeping ``max(n-1, round(density * n(n-1)/2))`` edges.

    A random recursive spanning tree is drawn first so the result is always
    connected; the remaining edges are sampled uniformly without replacement.
    """
    if n < 2:
        raise ValueError("need at least 2 vertices")
    if not 0 < density <= 1:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    total = n * (n - 1) // 2
    target = int(round(density * total))
    if target < n - 1:
        warnings.warn(f"density {density} is too low to connect {n} vertices; "
                      f"using a spanning tree ({n - 1} edges)", stacklevel=2)
        target = n - 1
    rng = np.random.default_rng(seed)
    tree = _random_tree(n, rng)
    chosen = set(tree)
    rest = [p for p in itertools.combinations(range(n), 2) if p not in chosen]
    extra = target - len(chosen)
    if extra > 0:
        picks = rng.choice(len(rest), size=extra, replace=False)
        chosen.update(rest[k] for k in picks)
    pairs = sorted(chosen)
    weights = 1.0 - rng.random(len(pairs))
    return build_graph(n, [(i, j, float(w)) for (i, j), w in zip(pairs, weights)])


def generate_augmentation_instance(n: int, n_candidates: int, seed: int = 0):
    """Odometry-chain base graph plus random loop-closure candidates.

    Returns ``(base, candidates)``: the base is the path ``0-1-...-(n-1)``,
    candidates are distinct non-consecutive pairs. All weights are U(0, 1].
    """
    rng = np.random.default_rng(seed)
    base = build_graph(n, [(i, i + 1, float(1.0 - rng.random())) for i in range(n - 1)])
    max_cand = n * (n - 1) // 2 - (n - 1)
    if n_candidates > max_cand:
        raise ValueError(f"at most {max_cand} loop closures fit on {n} vertices")
    chosen: set[tuple[int, int]] = set()
    while len(chosen) < n_candidates:
        a, b = (int(v) for v in rng.integers(0, n, size=2))
        i, j = min(a, b), max(a, b)
        if j - i >= 2:
            chosen.add((i, j))
    pairs = sorted(chosen)
    weights = 1.0 - rng.random(len(pairs))
    cands = build_graph(n, [(i, j, float(w)) for (i, j), w in zip(pairs, weights)])
    return base, cands


def write_edgelist(graph: WeightedGraph, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# n={graph.n}\n")
        w = csv.writer(fh)
        w.writerow(["i", "j", "w"])
        for i, j, wt in graph.edges:
            w.writerow([i, j, repr(wt)])


def parse_edgelist(path, n: Optional[int] = None) -> WeightedGraph:
    edges = []
    declared_n = n
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            first = row[0].strip()
            if first.startswith("#"):
                text = ",".join(row).lstrip("#").strip()
                if text.startswith("n=") and declared_n is None:
                    declared_n = int(text[2:])
                continue
            if not edges and first.lower() == "i":
                continue  # header row
            if len(row) != 3:
                raise ParseError(f"expected 'i,j,w', got {','.join(row)!r}", lineno)
            try:
                i, j, w = int(row[0]), int(row[1]), float(row[2])
            except ValueError:
                raise ParseError(f"malformed edge {','.join(row)!r}", lineno) from None
            if i == j:
                raise ParseError(f"self-loop in edge ({i}, {j}, {w})", lineno)
            if w <= 0:
                raise ParseError(f"non-positive weight in edge ({i}, {j}, {w})", lineno)
            edges.append((lineno, i, j, w))
    if declared_n is None:
        declared_n = 1 + max((max(i, j) for _, i, j, _ in edges), default=-1)
    seen = {}
    for lineno, i, j, w in edges:
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ParseError(f"duplicate pair {key} (first seen on line {seen[key]})", lineno)
        if max(i, j) >= declared_n or min(i, j) < 0:
            raise ParseError(f"vertex out of range in edge ({i}, {j}, {w})", lineno)
        seen[key] = lineno
    return build_graph(declared_n, [(i, j, w) for _, i, j, w in edges])


def save_instance(path, graph: WeightedGraph, base: Optional[WeightedGraph] = None,
                  metadata: Optional[dict] = None) -> None:
    doc = {"format": "algcon-instance", "version": 1, "n": graph.n,
           "edges": [[i, j, w] for i, j, w in graph.edges]}
    if base is not None and base.m:
        doc["base_edges"] = [[i, j, w] for i, j, w in base.edges]
    if metadata:
        doc["metadata"] = metadata
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def load_instance(path):
    """Return ``(candidates, base_or_None, metadata)`` from an instance JSON file."""
    with open(path) as fh:
        doc = json.load(fh)
    try:
        n = int(doc["n"])
        graph = build_graph(n, doc["edges"])
        base = build_graph(n, doc["base_edges"]) if doc.get("base_edges") else None
    except KeyError as exc:
        raise ParseError(f"instance file is missing field {exc}") from None
    if base is not None:
        shared = set(base.index) & set(graph.index)
        if shared:
            raise ParseError(f"base and candidate edges overlap on {sorted(shared)[0]}")
    return graph, base, doc.get("metadata", {})


_SE2_INFO = 6
_SE3_INFO = 21


def parse_posegraph(path, budget: Optional[int] = None, **spec_kw) -> ProblemSpec:
    """Read a g2o-style pose graph as an augmentation problem.

    Vertex ids are remapped to ``0..n-1`` in increasing order. Edges joining
    consecutive ids form the odometry base graph, all others are loop-closure
    candidates. An edge's weight is the last upper-triangular information
    entry (rotational information); a missing or zero entry becomes 1.
    Repeated measurements of the same pair are merged by summing weights.
    """
    ids: set[int] = set()
    raw: list[tuple[int, int, float, int]] = []
    skipped = 0
    defaulted = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            toks = line.split()
            if not toks or toks[0].startswith("#"):
                continue
            tag = toks[0]
            try:
                if tag.startswith("VERTEX_SE2") or tag.startswith("VERTEX_SE3"):
                    ids.add(int(toks[1]))
                elif tag in ("EDGE_SE2", "EDGE_SE3:QUAT", "EDGE_SE3"):
                    a, b = int(toks[1]), int(toks[2])
                    pose_len = 3 if tag == "EDGE_SE2" else 7
                    n_info = _SE2_INFO if tag == "EDGE_SE2" else _SE3_INFO
                    info = [float(t) for t in toks[3 + pose_len:3 + pose_len + n_info]]
                    w = info[-1] if len(info) == n_info else 0.0
                    if not w > 0:
                        w = 1.0
                        defaulted += 1
                    if a == b:
                        raise ParseError(f"self-loop on pose {a}", lineno)
                    ids.update((a, b))
                    raw.append((a, b, w, lineno))
                else:
                    skipped += 1
            except (ValueError, IndexError):
                raise ParseError(f"malformed {tag} record", lineno) from None
    if skipped:
        logger.warning("skipped %d unsupported records in %s", skipped, path)
    if defaulted:
        logger.warning("%d edges without rotational information got weight 1", defaulted)
    order = {v: k for k, v in enumerate(sorted(ids))}
    n = len(order)
    base: dict[tuple[int, int], float] = {}
    cand: dict[tuple[int, int], float] = {}
    merged = 0
    for a, b, w, _ in raw:
        i, j = sorted((order[a], order[b]))
        target = base if j == i + 1 else cand
        if (i, j) in target:
            merged += 1
        target[i, j] = target.get((i, j), 0.0) + w
    if merged:
        logger.warning("merged %d repeated measurements", merged)
    base_g = build_graph(n, [(i, j, w) for (i, j), w in base.items()])
    if n > 1 and not is_connected(base_g):
        missing = next(i for i in range(n - 1) if (i, i + 1) not in base)
        raise ParseError(f"odometry chain is broken between poses {sorted(ids)[missing]} "
                         f"and {sorted(ids)[missing + 1]}")
    cand_g = build_graph(n, [(i, j, w) for (i, j), w in cand.items()])
    q = cand_g.m if budget is None else min(int(budget), cand_g.m)
    return ProblemSpec.augmentation(base_g, cand_g, q, **spec_kw)


def load_problem(path, variant: str = "tree", budget: Optional[int] = None, **spec_kw) -> ProblemSpec:
    """Build a :class:`ProblemSpec` from a JSON instance, CSV edge list or g2o file."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".g2o":
        return parse_posegraph(path, budget, **spec_kw)
    if suffix == ".csv":
        graph, base = parse_edgelist(path), None
    else:
        graph, base, _ = load_instance(path)
    if variant in ("tree", "spanning_tree"):
        if base is not None:
            raise GraphError("spanning-tree instances cannot carry base edges")
        return ProblemSpec(graph, Variant.SPANNING_TREE, **spec_kw)
    if variant in ("augment", "augmentation"):
        if base is None:
            raise GraphError("augmentation needs base_edges in the instance file")
        return ProblemSpec(graph, Variant.AUGMENTATION, base, budget, **spec_kw)
    raise ValueError(f"unknown variant {variant!r}")
