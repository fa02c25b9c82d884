"""Benchmark suites.

Every suite yields rows with the columns of :data:`COLUMNS`:

``n, density, seed, method, value, time_s, iterations, mismatch``

``value`` is the suite's quantity of interest (phi for ``cheeger-oracle``,
lambda2 otherwise), ``iterations`` is the OA master-solve count (empty where
it does not apply) and ``mismatch`` is 1 when the row disagrees with the
suite's reference value. Rows are ordered by ``(n, density, seed, method)``.
"""

from __future__ import annotations

import csv
import math
import sys
import time
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from . import oa
from .cheeger import cheeger_bruteforce, cheeger_milp
from .graph import algebraic_connectivity
from .heuristics import HeuristicConfig, heuristic_solve
from .instances import generate_augmentation_instance, generate_instance
from .problem import ProblemSpec

__all__ = ["COLUMNS", "SUITES", "Row", "run_suite", "write_csv", "summarize"]

COLUMNS = ("n", "density", "seed", "method", "value", "time_s", "iterations", "mismatch")

CHEEGER_TOL = 1e-6
OA_REL_TOL = 1e-4


@dataclass
class Row:
    n: int
    density: float
    seed: int
    method: str
    value: float
    time_s: float
    iterations: Optional[int] = None
    mismatch: int = 0

    def as_tuple(self):
        return (self.n, self.density, self.seed, self.method, repr(float(self.value)),
                f"{self.time_s:.4f}", "" if self.iterations is None else self.iterations,
                self.mismatch)


def _timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def cheeger_oracle(ns=range(6, 15), densities=(0.4, 0.6, 0.8, 1.0), seeds=range(50),
                   backend=None) -> Iterator[Row]:
    for n in ns:
        for d in densities:
            for s in seeds:
                G = generate_instance(n, d, s)
                bf, t_bf = _timed(cheeger_bruteforce, G)
                mi, t_mi = _timed(cheeger_milp, G, backend)
                yield Row(n, d, s, "brute_force", bf.phi, t_bf)
                yield Row(n, d, s, "milp", mi.phi, t_mi,
                          mismatch=int(abs(mi.phi - bf.phi) > CHEEGER_TOL))
                # the lower Cheeger inequality with c_f = 1/2
                lam = algebraic_connectivity(G)
                yield Row(n, d, s, "half_lambda2", 0.5 * lam, 0.0,
                          mismatch=int(bf.phi < 0.5 * lam - 1e-9))


def oa_optimality(ns=(5, 6, 7, 8), seeds=range(10), modes=("off", "safe"), backend=None,
                  density: float = 1.0, time_limit: float = math.inf) -> Iterator[Row]:
    for n in ns:
        for s in seeds:
            G = generate_instance(n, density, s)
            spec = ProblemSpec.spanning_tree(G, time_limit=time_limit)
            (x_bf, lam_bf), t_bf = _timed(oa.brute_force_optimum, spec)
            yield Row(n, density, s, "brute_force", lam_bf, t_bf)
            for mode in modes:
                res = oa.solve_oa(spec.replace(cheeger_mode=mode), backend)
                bad = res.status != "Optimal" or abs(res.lb - lam_bf) > OA_REL_TOL * lam_bf
                yield Row(n, density, s, f"oa_{mode}", res.lb, res.wall_time, res.iterations,
                          int(bad))


def kopt_gap(n: int = 15, seeds=range(50), ks=(1, 2, 3), m: int = 20) -> Iterator[Row]:
    for s in seeds:
        G = generate_instance(n, 1.0, s)
        spec = ProblemSpec.spanning_tree(G)
        for k in ks:
            res = heuristic_solve(spec, HeuristicConfig(k=k, m=m))
            bad = res.lambda2 < res.initial_lambda2 - 1e-12
            yield Row(n, 1.0, s, f"{k}-opt", res.lambda2, res.wall_time, res.passes, int(bad))


def scaling(ns=(100, 250, 500, 1000), seeds=range(1), m: int = 20,
            candidate_ratio: float = 0.5, budget_ratio: float = 0.1) -> Iterator[Row]:
    for n in ns:
        for s in seeds:
            base, cand = generate_augmentation_instance(n, int(round(candidate_ratio * n)), s)
            spec = ProblemSpec.augmentation(base, cand, max(1, int(round(budget_ratio * n))))
            res = heuristic_solve(spec, HeuristicConfig(k=1, m=m))
            yield Row(n, cand.m / (n * (n - 1) / 2), s, "initial", res.initial_lambda2,
                      res.initial_time)
            yield Row(n, cand.m / (n * (n - 1) / 2), s, "1-opt", res.lambda2, res.wall_time,
                      res.passes, int(not res.lambda2 > res.initial_lambda2))


SUITES = {
    "cheeger-oracle": cheeger_oracle,
    "oa-optimality": oa_optimality,
    "kopt-gap": kopt_gap,
    "scaling": scaling,
}


def run_suite(name: str, seeds: Optional[int] = None, **kw) -> list[Row]:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    if seeds is not None:
        kw["seeds"] = range(seeds)
    return list(fn(**kw))


def write_csv(rows: Iterable[Row], fh=None) -> None:
    w = csv.writer(fh or sys.stdout, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.as_tuple())


def summarize(name: str, rows: Sequence[Row]) -> dict:
    out = {"suite": name, "rows": len(rows), "mismatches": sum(r.mismatch for r in rows)}
    if name == "kopt-gap":
        by_k: dict[str, list[float]] = {}
        for r in rows:
            by_k.setdefault(r.method, []).append(r.value)
        means = {k: float(np.mean(v)) for k, v in by_k.items()}
        out["mean_lambda2"] = means
        if "1-opt" in by_k and "3-opt" in by_k:
            a, b = np.array(by_k["1-opt"]), np.array(by_k["3-opt"])
            out["mean_gap_1opt_vs_3opt"] = float(np.mean((b - a) / b))
    if name == "oa-optimality":
        out["iterations"] = {}
        for r in rows:
            if r.iterations is not None:
                out["iterations"].setdefault(r.method, 0)
                out["iterations"][r.method] += r.iterations
    out["total_time_s"] = float(sum(r.time_s for r in rows))
    return out
