"""A small solver-agnostic MILP modeling layer.

Models are built with :func:`new_model`, :meth:`MilpModel.add_variable` and
:meth:`MilpModel.add_constraint`, then handed to a backend through
:func:`solve`. The reference backend is HiGHS via :func:`scipy.optimize.milp`.

Models can be dumped to a readable LP-style listing (:meth:`MilpModel.dumps`)
and parsed back (:func:`loads`); the round trip is exact because coefficients
are written with ``repr``.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
import time
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, LinearConstraint, milp


__all__ = [
    "ModelError",
    "Sense",
    "VarKind",
    "Status",
    "VarId",
    "ConId",
    "Variable",
    "Constraint",
    "MilpModel",
    "MilpSolution",
    "SolveLimits",
    "SolverConfig",
    "new_model",
    "solve",
    "loads",
    "get_backend",
    "available_backends",
]


class ModelError(ValueError):
    pass


class Sense(str, enum.Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class VarKind(str, enum.Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    TIME_LIMIT = "TimeLimit"
    ERROR = "Error"


_ROW_SENSES = ("<=", ">=", "=")
_model_tokens = itertools.count()


@dataclass(frozen=True)
class VarId:
    model: int
    index: int

    def __repr__(self):
        return f"x{self.index}"


@dataclass(frozen=True)
class ConId:
    model: int
    index: int


@dataclass
class Variable:
    kind: VarKind
    lower: float
    upper: float
    name: str


@dataclass
class Constraint:
    coeffs: dict[int, float]
    sense: str
    rhs: float
    name: str = ""

    def activity(self, values: np.ndarray) -> float:
        return math.fsum(c * values[k] for k, c in self.coeffs.items())


Expr = Union[Mapping[VarId, float], Iterable[tuple[VarId, float]]]


class MilpModel:
    def __init__(self, sense: Sense = Sense.MINIMIZE):
        self.sense = Sense(sense)
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.objective: dict[int, float] = {}
        self._token = next(_model_tokens)

    def __repr__(self):
        return (f"MilpModel({self.sense.value}, {len(self.variables)} vars, "
                f"{len(self.constraints)} constraints)")

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def var(self, index: int) -> VarId:
        if not 0 <= index < len(self.variables):
            raise ModelError(f"no variable with index {index}")
        return VarId(self._token, index)

    def add_variable(self, kind: VarKind = VarKind.CONTINUOUS, lower: float = 0.0,
                     upper: float = math.inf, name: str = "") -> VarId:
        kind = VarKind(kind)
        if kind is VarKind.BINARY:
            lower, upper = max(0.0, lower), min(1.0, upper)
        lower, upper = float(lower), float(upper)
        if math.isnan(lower) or math.isnan(upper):
            raise ModelError(f"NaN bound on variable {name!r}")
        self.variables.append(Variable(kind, lower, upper, name or f"x{len(self.variables)}"))
        return VarId(self._token, len(self.variables) - 1)

    def _linear(self, expr: Expr) -> dict[int, float]:
        items = expr.items() if isinstance(expr, Mapping) else expr
        out: dict[int, float] = {}
        for var, coef in items:
            if not isinstance(var, VarId) or var.model != self._token \
                    or not 0 <= var.index < len(self.variables):
                raise ModelError(f"variable {var!r} does not belong to this model")
            coef = float(coef)
            if not math.isfinite(coef):
                raise ModelError(f"non-finite coefficient {coef} on {var!r}")
            out[var.index] = out.get(var.index, 0.0) + coef
        return out

    def add_constraint(self, expr: Expr, sense: str, rhs: float, name: str = "") -> ConId:
        if sense not in _ROW_SENSES:
            raise ModelError(f"constraint sense must be one of {_ROW_SENSES}, got {sense!r}")
        coeffs = self._linear(expr)
        self.constraints.append(Constraint(coeffs, sense, float(rhs), name or f"c{len(self.constraints)}"))
        return ConId(self._token, len(self.constraints) - 1)

    def set_objective(self, expr: Expr) -> None:
        self.objective = self._linear(expr)

    def objective_value(self, values) -> float:
        return math.fsum(c * values[k] for k, c in self.objective.items())

    def max_violation(self, values) -> float:
        """Largest absolute violation of any row or bound at ``values``."""
        values = np.asarray(values, dtype=float)
        worst = 0.0
        for con in self.constraints:
            a = con.activity(values)
            if con.sense == "<=":
                worst = max(worst, a - con.rhs)
            elif con.sense == ">=":
                worst = max(worst, con.rhs - a)
            else:
                worst = max(worst, abs(a - con.rhs))
        for k, v in enumerate(self.variables):
            worst = max(worst, v.lower - values[k], values[k] - v.upper)
            if v.kind is VarKind.BINARY:
                worst = max(worst, min(abs(values[k]), abs(values[k] - 1)))
        return worst

    def copy(self) -> "MilpModel":
        return loads(self.dumps())

    def dumps(self) -> str:
        lines = ["\\ algcon-milp v1", self.sense.value, "  obj:" + _fmt_expr(self.objective),
                 "subject to"]
        for con in self.constraints:
            lines.append(f"  {con.name}:{_fmt_expr(con.coeffs)} {con.sense} {con.rhs!r}")
        lines.append("variables")
        for k, v in enumerate(self.variables):
            lines.append(f"  x{k} {v.kind.value} {v.lower!r} {v.upper!r} {v.name}")
        lines.append("end")
        return "\n".join(lines) + "\n"


def _fmt_expr(coeffs: Mapping[int, float]) -> str:
    return "".join(f" {'+' if c >= 0 else '-'} {abs(c)!r} x{k}" for k, c in coeffs.items())


def _parse_expr(tokens: list[str]) -> dict[int, float]:
    out = {}
    for sign, mag, var in zip(tokens[0::3], tokens[1::3], tokens[2::3]):
        c = float(mag)
        out[int(var[1:])] = -c if sign == "-" else c
    return out


def loads(text: str) -> MilpModel:
    """Parse the listing produced by :meth:`MilpModel.dumps`."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("\\")]
    try:
        model = MilpModel(Sense(lines[0]))
        obj = lines[1].split()
        assert obj[0] == "obj:"
        objective = _parse_expr(obj[1:])
        k = lines.index("subject to") + 1
        end_rows = lines.index("variables")
        rows = []
        for ln in lines[k:end_rows]:
            name, rest = ln.split(":", 1)
            toks = rest.split()
            rows.append((name, _parse_expr(toks[:-2]), toks[-2], float(toks[-1])))
        for ln in lines[end_rows + 1:lines.index("end")]:
            toks = ln.split(maxsplit=4)
            model.add_variable(VarKind(toks[1]), float(toks[2]), float(toks[3]),
                               toks[4] if len(toks) > 4 else "")
    except (ValueError, IndexError, AssertionError) as exc:
        raise ModelError(f"malformed model listing: {exc}") from exc
    for name, coeffs, sense, rhs in rows:
        model.add_constraint({model.var(i): c for i, c in coeffs.items()}, sense, rhs, name)
    model.set_objective({model.var(i): c for i, c in objective.items()})
    return model


def new_model(sense: Sense | str = Sense.MINIMIZE) -> MilpModel:
    return MilpModel(Sense(sense))


@dataclass
class MilpSolution:
    status: Status
    objective: float = math.nan
    values: dict[VarId, float] = field(default_factory=dict)
    wall_time: float = 0.0
    # best proven bound on the optimum (dual bound), when the backend reports one
    bound: float = math.nan
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    def __getitem__(self, var: VarId) -> float:
        return self.values[var]

    def array(self, vars: Iterable[VarId]) -> np.ndarray:
        return np.array([self.values[v] for v in vars])


@dataclass(frozen=True)
class SolveLimits:
    time_limit: float = math.inf
    rel_gap: float = 1e-6
    abs_gap: float = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings keyed as ``solver.backend``, ``solver.time_limit_s``, ``solver.rel_gap``.

    The ``ALGCON_SOLVER`` environment variable overrides the backend name.
    """

    backend: str = "highs"
    time_limit_s: float = math.inf
    rel_gap: float = 1e-6

    @classmethod
    def from_mapping(cls, cfg: Optional[Mapping] = None) -> "SolverConfig":
        cfg = dict(cfg or {})
        backend = os.environ.get("ALGCON_SOLVER") or cfg.get("solver.backend", cls.backend)
        return cls(str(backend), float(cfg.get("solver.time_limit_s", math.inf)),
                   float(cfg.get("solver.rel_gap", cls.rel_gap)))

    def limits(self, time_limit: Optional[float] = None) -> SolveLimits:
        tl = self.time_limit_s if time_limit is None else min(time_limit, self.time_limit_s)
        return SolveLimits(time_limit=tl, rel_gap=self.rel_gap)

    def as_dict(self) -> dict:
        return {"solver.backend": self.backend, "solver.time_limit_s": self.time_limit_s,
                "solver.rel_gap": self.rel_gap}


class HighsBackend:
    """HiGHS through :func:`scipy.optimize.milp` (single-threaded, deterministic)."""

    name = "highs"

    def __init__(self, presolve: bool = True):
        self.presolve = presolve

    def solve(self, model: MilpModel, limits: SolveLimits) -> MilpSolution:
        nv = model.num_vars
        if nv == 0:
            raise ModelError("model has no variables")
        sign = -1.0 if model.sense is Sense.MAXIMIZE else 1.0
        c = np.zeros(nv)
        for k, coef in model.objective.items():
            c[k] = sign * coef
        lb = np.array([v.lower for v in model.variables])
        ub = np.array([v.upper for v in model.variables])
        integrality = np.array([v.kind is VarKind.BINARY for v in model.variables], dtype=np.uint8)

        constraints = ()
        if model.constraints:
            rows, cols, vals = [], [], []
            blo = np.full(model.num_constraints, -np.inf)
            bup = np.full(model.num_constraints, np.inf)
            for r, con in enumerate(model.constraints):
                rows.extend([r] * len(con.coeffs))
                cols.extend(con.coeffs.keys())
                vals.extend(con.coeffs.values())
                if con.sense in ("<=", "="):
                    bup[r] = con.rhs
                if con.sense in (">=", "="):
                    blo[r] = con.rhs
            A = sp.csr_matrix((vals, (rows, cols)), shape=(model.num_constraints, nv))
            constraints = LinearConstraint(A, blo, bup)

        options = {"mip_rel_gap": limits.rel_gap, "mip_abs_gap": limits.abs_gap,
                   "presolve": self.presolve}
        if math.isfinite(limits.time_limit):
            options["time_limit"] = max(float(limits.time_limit), 1e-3)
        t0 = time.perf_counter()
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", message="Unrecognized options")
            try:
                res = milp(c, integrality=integrality, bounds=Bounds(lb, ub),
                           constraints=constraints, options=options)
            except Exception as exc:  # backend crash surfaces as a status
                return MilpSolution(Status.ERROR, wall_time=time.perf_counter() - t0,
                                    message=f"{type(exc).__name__}: {exc}")
        wall = time.perf_counter() - t0

        status = {0: Status.OPTIMAL, 1: Status.TIME_LIMIT, 2: Status.INFEASIBLE,
                  3: Status.UNBOUNDED}.get(res.status, Status.ERROR)
        if res.x is None:
            return MilpSolution(status, wall_time=wall, message=res.message)
        x = np.array(res.x, dtype=float)
        if status is Status.OPTIMAL:
            binary = integrality.astype(bool)
            x[binary] = np.round(x[binary])
        values = {VarId(model._token, k): float(x[k]) for k in range(nv)}
        dual = getattr(res, "mip_dual_bound", None)
        bound = sign * dual if dual is not None and np.isfinite(dual) else math.nan
        if not integrality.any() and status is Status.OPTIMAL:
            bound = sign * float(res.fun)
        return MilpSolution(status, model.objective_value(x), values, wall, bound, res.message)


_BACKENDS = {"highs": HighsBackend, "scipy": HighsBackend}


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend(name: Optional[str] = None):
    """Instantiate a backend by name (``None`` falls back to ``ALGCON_SOLVER`` or ``highs``)."""
    name = name or os.environ.get("ALGCON_SOLVER") or "highs"
    try:
        return _BACKENDS[name.lower()]()
    except KeyError:
        return None


def solve(model: MilpModel, limits: SolveLimits = SolveLimits(), backend=None) -> MilpSolution:
    """Solve ``model``; an unknown backend name yields ``Status.ERROR`` rather than raising."""
    if isinstance(backend, str) or backend is None:
        name = backend
        backend = get_backend(backend)
        if backend is None:
            return MilpSolution(Status.ERROR, message=f"backend {name!r} is not available "
                                f"(have {available_backends()})")
    if model.num_vars == 0:
        raise ModelError("model has no variables")
    return backend.solve(model, limits)
