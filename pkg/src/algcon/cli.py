"""Command-line interface (``algcon`` / ``python -m algcon``).

Every command that produces a result writes a RunReport (JSON, schema
``algcon-run-report/v1``) holding the command name, the full configuration
echo, the result, per-phase wall times and any iteration log. ``algcon rerun
report.json`` replays the echoed configuration and checks that selections,
lambda2 values and cut counts come out identical.

Errors go to stderr as one JSON object ``{"error": <kind>, "message": ...}``
with exit status 2 (usage/config), 3 (input data) or 4 (solver/runtime).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
import time
import warnings
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__, bench
from . import milp as mi
from .cheeger import cheeger_constant
from .graph import GraphError
from .heuristics import HeuristicConfig, heuristic_solve
from .instances import (GENERATOR, ParseError, generate_augmentation_instance, generate_instance,
                        load_problem, save_instance, write_edgelist, parse_edgelist, load_instance)
from .jsonutil import clean as _clean
from .jsonutil import finite as _finite
from .oa import OaConfig, solve_oa
from .problem import CheegerMode, InfeasibleError

REPORT_SCHEMA = "algcon-run-report/v1"

logger = logging.getLogger("algcon")


class CliError(Exception):
    def __init__(self, kind: str, message: str, code: int):
        super().__init__(message)
        self.kind = kind
        self.code = code


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _float(v) -> float:
    if v in ("inf", None):
        return math.inf
    return float(v)


def _solver_cfg(config: dict) -> mi.SolverConfig:
    return mi.SolverConfig.from_mapping(config.get("solver", {}))


def _report(command: str, config: dict, result: dict, timings: dict, log=None) -> dict:
    return _clean({"schema": REPORT_SCHEMA, "version": __version__, "command": command,
                   "config": config, "result": result, "timings": timings,
                   "log": log or []})


def _emit(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, indent=1)
    if out:
        Path(out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


# ---------------------------------------------------------------- runners

def run_cheeger(config: dict) -> dict:
    t0 = time.perf_counter()
    path = config["instance"]
    if str(path).endswith(".csv"):
        G = parse_edgelist(path)
    else:
        G, base, _ = load_instance(path)
        if base is not None:
            from .graph import build_graph
            G = build_graph(G.n, list(G.edges) + list(base.edges))
    t_load = time.perf_counter() - t0
    solver = _solver_cfg(config)
    method = {"milp": "milp", "brute": "brute_force", "auto": None}[config["method"]]
    res = cheeger_constant(G, solver.backend, method,
                           time_limit=_float(config.get("time_limit")))
    return _report("cheeger", config,
                   {"phi": res.phi, "cut": list(res.cut), "method": res.method},
                   {"load_s": t_load, "solve_s": res.wall_time})


def _spec_kw(config: dict) -> dict:
    return {"cheeger_mode": CheegerMode.parse(config.get("cheeger_mode", "off")),
            "eps_opt": float(config.get("eps", 1e-4)),
            "max_iter": int(config.get("max_iter", 10_000)),
            "time_limit": _float(config.get("time_limit"))}


def run_solve(config: dict) -> dict:
    t0 = time.perf_counter()
    spec = load_problem(config["instance"], config["variant"], config.get("budget"),
                        **_spec_kw(config))
    t_load = time.perf_counter() - t0
    solver = _solver_cfg(config)
    backend = mi.get_backend(solver.backend)
    if backend is None:
        raise CliError("solver", f"MILP backend {solver.backend!r} is not available", 4)
    oa_cfg = OaConfig(warm_start=bool(config.get("warm_start", True)))
    res = solve_oa(spec, backend, oa_cfg)
    result = res.to_dict(spec)
    result["lambda2"] = res.lb
    return _report("solve", config, result, {"load_s": t_load, "solve_s": res.wall_time},
                   res.log)


def run_heuristic(config: dict) -> dict:
    t0 = time.perf_counter()
    spec = load_problem(config["instance"], config["variant"], config.get("budget"))
    t_load = time.perf_counter() - t0
    cfg = HeuristicConfig(k=int(config["k"]), m=int(config["m"]),
                          max_passes=int(config.get("max_passes", 100)))
    res = heuristic_solve(spec, cfg, _float(config.get("time_limit")))
    moves = [{"added": [list(p) for p in mv.added], "removed": [list(p) for p in mv.removed],
              "before": mv.before, "after": mv.after} for mv in res.moves]
    result = {"lambda2": res.lambda2, "initial_lambda2": res.initial_lambda2,
              "selection": [list(p) for p in spec.selected_pairs(res.selection)],
              "passes": res.passes, "moves": len(res.moves),
              "relaxed_two_hop": res.relaxed_two_hop}
    return _report("heuristic", config, result,
                   {"load_s": t_load, "initial_s": res.initial_time, "total_s": res.wall_time},
                   moves)


RUNNERS = {"cheeger": run_cheeger, "solve": run_solve, "heuristic": run_heuristic}

# deterministic result fields compared by ``rerun``
REPRO_FIELDS = {
    "cheeger": ("phi", "cut"),
    "solve": ("selection", "lambda2", "lb", "eig_cuts", "cheeger_cuts", "iterations", "status"),
    "heuristic": ("selection", "lambda2", "initial_lambda2", "passes", "moves"),
}


# ---------------------------------------------------------------- handlers

def _instance_config(args) -> dict:
    return {"instance": str(args.instance), "instance_sha256": _sha256(args.instance)}


def _solver_config(args) -> dict:
    solver = {"solver.backend": args.backend} if args.backend else {}
    if getattr(args, "rel_gap", None) is not None:
        solver["solver.rel_gap"] = args.rel_gap
    return solver


def cmd_cheeger(args) -> int:
    config = _instance_config(args)
    config.update(method=args.method, time_limit=_finite(args.time_limit),
                  solver=_solver_config(args))
    report = run_cheeger(config)
    if args.out:
        _emit(report, args.out)
    r = report["result"]
    print(f"phi={r['phi']!r} S={r['cut']} method={r['method']} "
          f"time={report['timings']['solve_s']:.3f}s")
    return 0


def cmd_solve(args) -> int:
    config = _instance_config(args)
    config.update(variant=args.variant, budget=args.budget, cheeger_mode=args.cheeger_mode,
                  eps=args.eps, warm_start=args.warm_start, max_iter=args.max_iter,
                  time_limit=_finite(args.time_limit), solver=_solver_config(args))
    report = run_solve(config)
    _emit(report, args.out)
    if args.log:
        Path(args.log).write_text(json.dumps({"schema": "algcon-oa-log/v1",
                                              "log": report["log"]}, indent=1) + "\n")
    if args.out:
        r = report["result"]
        print(f"status={r['status']} lambda2={r['lb']!r} ub={r['ub']!r} gap={r['gap']:.3g} "
              f"iterations={r['iterations']} eig_cuts={r['eig_cuts']} "
              f"cheeger_cuts={r['cheeger_cuts']}")
    return 0


def cmd_heuristic(args) -> int:
    try:
        HeuristicConfig(k=args.k, m=args.m, max_passes=args.max_passes)
    except ValueError as exc:
        raise CliError("config", str(exc), 2) from None
    config = _instance_config(args)
    config.update(variant=args.variant, budget=args.budget, k=args.k, m=args.m,
                  max_passes=args.max_passes, time_limit=_finite(args.time_limit))
    report = run_heuristic(config)
    _emit(report, args.out)
    if args.out:
        r = report["result"]
        print(f"lambda2={r['lambda2']!r} initial={r['initial_lambda2']!r} passes={r['passes']}")
    return 0


def cmd_gen(args) -> int:
    meta = {"seed": args.seed, "generator": GENERATOR}
    if args.augment is not None:
        base, cand = generate_augmentation_instance(args.n, args.augment, args.seed)
        meta["kind"] = "augmentation"
        meta["candidates"] = args.augment
    else:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cand, base = generate_instance(args.n, args.density, args.seed), None
        for w in caught:
            print(json.dumps({"warning": str(w.message)}), file=sys.stderr)
        meta["density"] = args.density
    if str(args.out).endswith(".csv"):
        if base is not None:
            raise CliError("config", "edge-list CSV cannot hold base edges; use .json", 2)
        write_edgelist(cand, args.out)
    else:
        save_instance(args.out, cand, base, meta)
    print(f"wrote {args.out}: n={args.n} edges={cand.m}"
          + (f" base_edges={base.m}" if base is not None else ""))
    return 0


def cmd_bench(args) -> int:
    kw = {}
    if args.n:
        if args.suite == "kopt-gap":
            if len(args.n) != 1:
                raise CliError("config", "kopt-gap takes a single --n", 2)
            kw["n"] = args.n[0]
        else:
            kw["ns"] = args.n
    if args.density and args.suite == "cheeger-oracle":
        kw["densities"] = args.density
    if args.backend and args.suite in ("cheeger-oracle", "oa-optimality"):
        kw["backend"] = args.backend
    rows = bench.run_suite(args.suite, args.seeds, **kw)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            bench.write_csv(rows, fh)
    else:
        bench.write_csv(rows)
    summary = bench.summarize(args.suite, rows)
    print(json.dumps(summary), file=sys.stderr if not args.out else sys.stdout)
    return 0 if summary["mismatches"] == 0 else 1


def cmd_rerun(args) -> int:
    report = json.loads(Path(args.report).read_text())
    if report.get("schema") != REPORT_SCHEMA:
        raise CliError("input", f"{args.report} is not a {REPORT_SCHEMA} report", 3)
    command = report["command"]
    config = report["config"]
    sha = config.get("instance_sha256")
    if sha and _sha256(config["instance"]) != sha:
        raise CliError("input", f"instance {config['instance']} changed since the report", 3)
    fresh = RUNNERS[command](config)
    diffs = {}
    for key in REPRO_FIELDS[command]:
        if report["result"].get(key) != fresh["result"].get(key):
            diffs[key] = {"report": report["result"].get(key), "rerun": fresh["result"].get(key)}
    if args.out:
        _emit(fresh, args.out)
    print(json.dumps({"command": command, "identical": not diffs, "differences": diffs}))
    return 0 if not diffs else 1


# ---------------------------------------------------------------- parser

def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="algcon",
                                description="Algebraic-connectivity maximization toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def solver_opts(sp):
        sp.add_argument("--backend", help="MILP backend (default: $ALGCON_SOLVER or highs)")

    c = sub.add_parser("cheeger", help="exact Cheeger constant of an instance")
    c.add_argument("instance")
    c.add_argument("--method", choices=("milp", "brute", "auto"), default="milp")
    c.add_argument("--time-limit", type=_positive_float, default=math.inf)
    c.add_argument("--out", help="also write a RunReport here")
    solver_opts(c)
    c.set_defaults(func=cmd_cheeger)

    def problem_opts(sp):
        sp.add_argument("instance")
        sp.add_argument("--variant", choices=("tree", "augment"), required=True)
        sp.add_argument("--budget", type=int, help="edge budget q (augment)")
        sp.add_argument("--out", help="RunReport path (default: stdout)")
        sp.add_argument("--time-limit", type=_positive_float, default=math.inf)

    s = sub.add_parser("solve", help="exact outer-approximation solve")
    problem_opts(s)
    s.add_argument("--cheeger-mode", default="off",
                   help="off, safe or scaled=<alpha> (default off)")
    s.add_argument("--eps", type=_positive_float, default=1e-4)
    s.add_argument("--warm-start", action=argparse.BooleanOptionalAction, default=True,
                   help="seed the incumbent with the k-opt heuristic")
    s.add_argument("--max-iter", type=int, default=10_000)
    s.add_argument("--log", help="write the per-iteration log here")
    solver_opts(s)
    s.set_defaults(func=cmd_solve)

    h = sub.add_parser("heuristic", help="greedy k-opt heuristic")
    problem_opts(h)
    h.add_argument("--k", type=int, default=1)
    h.add_argument("--m", type=int, default=20)
    h.add_argument("--max-passes", type=int, default=100)
    h.set_defaults(func=cmd_heuristic)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--density", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--augment", type=int, metavar="K",
                   help="augmentation instance: path base graph plus K loop closures")
    g.add_argument("--out", required=True, help=".json instance or .csv edge list")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="benchmark suites (CSV on stdout or --out)")
    b.add_argument("--suite", choices=sorted(bench.SUITES), required=True)
    b.add_argument("--seeds", type=int)
    b.add_argument("--n", type=int, nargs="+")
    b.add_argument("--density", type=float, nargs="+")
    b.add_argument("--out")
    solver_opts(b)
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("rerun", help="replay a RunReport and compare results")
    r.add_argument("report")
    r.add_argument("--out")
    r.set_defaults(func=cmd_rerun)
    return p


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return 0
        return _fail("usage", "invalid command line (see --help)", 2)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except CliError as exc:
        return _fail(exc.kind, str(exc), exc.code)
    except (ParseError, GraphError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        return _fail("input", str(exc), 3)
    except (InfeasibleError,) as exc:
        return _fail("infeasible", str(exc), 4)
    except ValueError as exc:
        return _fail("config", str(exc), 2)
    except RuntimeError as exc:
        return _fail("solver", str(exc), 4)


def main_entry() -> None:
    sys.exit(main())
