"""Branch-and-cut driver over a generic MILP backend.

The bundled backend is HiGHS through ``scipy.optimize.milp``.  It exposes
no solver callbacks, so both separation modes run as outer loops:

- ``ibc``: solve the MILP, check each trolley's support graph for
  connectivity with a DFS, add one row per detached component, re-solve.
- ``fbc``: first run a root-node cutting-plane loop on the LP relaxation
  using min-cut separation, then continue with the ``ibc`` loop.

Each iteration adds at least one row violated by the current point from a
finite family, so both loops terminate.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from .graph import ORIGIN, PickingGraph, reduce_graph, walk_length
from .instance import Instance, InstanceError, Order
from .model import (
    ALL_FAMILIES,
    ModelSpec,
    SENSE_EQ,
    SENSE_GE,
    SENSE_LE,
    build_model,
    collapse_subaisles,
    connectivity_row,
    xvar,
    zvar,
)
from .separation import CutPool, integral_components, separate_fractional
from .warehouse import ticks_to_metres


class SolveError(RuntimeError):
    """Backend failure or structurally inconsistent solution."""


@dataclass(frozen=True)
class BackendContract:
    """Capabilities of the MILP backend in use."""

    name: str = "scipy-highs"
    lazy_integral_callbacks: bool = False
    fractional_cut_callbacks: bool = False
    warm_start: bool = False
    time_limit: bool = True
    lp_relaxation_solve: bool = True
    options: dict = field(default_factory=dict)


@dataclass
class SolveConfig:
    mode: str = "ibc"  # "ibc" or "fbc"
    families: tuple = ALL_FAMILIES
    no_reversal: bool = False
    time_limit: float | None = None
    warm_start: object = None  # optional Solution
    backend_options: dict = field(default_factory=dict)
    max_rounds: int = 200
    max_fractional_rounds: int = 50
    cut_pool_capacity: int = 2000

    def __post_init__(self) -> None:
        if self.mode not in ("ibc", "fbc"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class Solution:
    assignments: dict  # trolley -> sorted list of order ids
    walks: dict  # trolley -> vertex list (closed walk from the origin)
    objective_ticks: int
    lower_bound_ticks: float
    root_bound_ticks: float
    optimal: bool
    rounds: int = 0
    connectivity_cuts: int = 0
    row_counts: dict = field(default_factory=dict)
    wall_time: float = 0.0
    mode: str = "ibc"
    families: tuple = ()
    no_reversal: bool = False

    @property
    def objective(self) -> float:
        return ticks_to_metres(self.objective_ticks)

    @property
    def lower_bound(self) -> float:
        return ticks_to_metres(self.lower_bound_ticks)

    @property
    def root_bound(self) -> float:
        return ticks_to_metres(self.root_bound_ticks)

    @property
    def gap_percent(self) -> float:
        if self.objective_ticks == 0:
            return 0.0
        return 100.0 * (self.objective_ticks - self.lower_bound_ticks) / self.objective_ticks

    @property
    def root_gap_percent(self) -> float:
        if self.objective_ticks == 0:
            return 0.0
        return 100.0 * (self.objective_ticks - self.root_bound_ticks) / self.objective_ticks

    def to_dict(self) -> dict:
        return {
            "assignments": {str(t): list(o) for t, o in self.assignments.items()},
            "walks": {
                str(t): [list(v) for v in walk] for t, walk in self.walks.items()
            },
            "objective_m": self.objective,
            "objective_ticks": self.objective_ticks,
            "lower_bound_m": self.lower_bound,
            "root_bound_m": self.root_bound,
            "gap_percent": self.gap_percent,
            "root_gap_percent": self.root_gap_percent,
            "optimal": self.optimal,
            "rounds": self.rounds,
            "connectivity_cuts": self.connectivity_cuts,
            "row_counts": self.row_counts,
            "wall_time_s": self.wall_time,
            "mode": self.mode,
            "families": list(self.families),
            "no_reversal": self.no_reversal,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


BENCHMARK_COLUMNS = ("instance", "T(s)", "UB", "GAP", "LB", "FGAP", "FLB", "NS")


def benchmark_row(name: str, sol: Solution) -> dict:
    """One benchmark CSV row; NS (node counts) are backend-internal and
    unavailable through this backend, reported as the number of outer
    solve rounds instead."""
    return {
        "instance": name,
        "T(s)": f"{sol.wall_time:.1f}",
        "UB": f"{sol.objective:.1f}",
        "GAP": f"{sol.gap_percent:.1f}",
        "LB": f"{sol.lower_bound:.1f}",
        "FGAP": f"{sol.root_gap_percent:.1f}",
        "FLB": f"{sol.root_bound:.1f}",
        "NS": str(sol.rounds),
    }


# ---------------------------------------------------------------------------
# matrix assembly and backend calls


def _assemble(spec: ModelSpec, extra_rows: list):
    keys = list(spec.variables)
    index = {k: i for i, k in enumerate(keys)}
    n = len(keys)
    c = np.zeros(n)
    for k, coef in spec.objective.items():
        c[index[k]] = coef
    lb = np.array([spec.variables[k].lb for k in keys], dtype=float)
    ub = np.array([spec.variables[k].ub for k in keys], dtype=float)
    integrality = np.array(
        [1 if spec.variables[k].integral else 0 for k in keys]
    )
    rows = spec.rows + extra_rows
    data, ri, ci = [], [], []
    lo = np.empty(len(rows))
    hi = np.empty(len(rows))
    for r, row in enumerate(rows):
        for k, coef in row.coeffs.items():
            ri.append(r)
            ci.append(index[k])
            data.append(coef)
        if row.sense == SENSE_LE:
            lo[r], hi[r] = -np.inf, row.rhs
        elif row.sense == SENSE_GE:
            lo[r], hi[r] = row.rhs, np.inf
        else:
            lo[r], hi[r] = row.rhs, row.rhs
    mat = sparse.csr_matrix(
        (data, (ri, ci)), shape=(len(rows), n)
    )
    return keys, c, Bounds(lb, ub), integrality, LinearConstraint(mat, lo, hi)


def _solve_once(
    spec: ModelSpec,
    extra_rows: list,
    relax: bool,
    time_limit: float | None,
    backend_options: dict,
):
    keys, c, bounds, integrality, constraint = _assemble(spec, extra_rows)
    if relax:
        integrality = np.zeros_like(integrality)
    options = {"mip_rel_gap": 0.0, "presolve": True}
    options.update(backend_options)
    if time_limit is not None:
        options["time_limit"] = max(time_limit, 0.01)
    res = milp(
        c,
        constraints=[constraint],
        integrality=integrality,
        bounds=bounds,
        options=options,
    )
    if res.status == 2:
        raise SolveError("backend reports the model infeasible")
    if res.x is None:
        raise SolveError(f"backend returned no solution (status {res.status})")
    values = {k: float(v) for k, v in zip(keys, res.x)}
    dual = getattr(res, "mip_dual_bound", None)
    lower = float(dual) if dual is not None else float(res.fun)
    return values, float(res.fun), lower, res.status == 0


# ---------------------------------------------------------------------------
# walk extraction


def extract_walk(graph: PickingGraph, arcs: list) -> list:
    """Closed walk from the origin using each selected arc exactly once."""
    if not arcs:
        return [ORIGIN]
    succ: dict = {}
    out_deg: dict = {}
    in_deg: dict = {}
    for u, v in arcs:
        succ.setdefault(u, []).append(v)
        out_deg[u] = out_deg.get(u, 0) + 1
        in_deg[v] = in_deg.get(v, 0) + 1
    if len(set(arcs)) != len(arcs):
        raise SolveError("arc selected more than once")
    for u in set(out_deg) | set(in_deg):
        if out_deg.get(u, 0) != in_deg.get(u, 0):
            raise SolveError(f"unbalanced vertex {u} in walk extraction")
    if ORIGIN not in succ:
        raise SolveError("selected arcs do not touch the origin")
    for u in succ:
        succ[u].sort()
    # Hierholzer: build and splice cycles
    stack = [ORIGIN]
    walk: list = []
    while stack:
        u = stack[-1]
        if succ.get(u):
            stack.append(succ[u].pop())
        else:
            walk.append(stack.pop())
    walk.reverse()
    used = sum(len(v) for v in succ.values())
    if used or len(walk) != len(arcs) + 1:
        raise SolveError("selected arcs are disconnected; separation failed")
    return walk


def _solution_from_values(
    spec: ModelSpec, values: dict, tol: float = 1e-4
) -> tuple:
    inst = spec.instance
    g = inst.graph
    assignments: dict = {}
    walks: dict = {}
    for t in spec.trolleys:
        orders = sorted(
            o.id for o in inst.orders if values.get(zvar(o.id, t), 0) > 0.5
        )
        arcs = [
            (u, v)
            for u in g.adj
            for v in g.adj[u]
            if values.get(xvar(t, u, v), 0) > 0.5
        ]
        if orders or arcs:
            assignments[t] = orders
            walks[t] = extract_walk(g, arcs)
    return assignments, walks


# ---------------------------------------------------------------------------
# main driver


def solve_jobprp(instance: Instance, config: SolveConfig | None = None) -> Solution:
    config = config or SolveConfig()
    start = time.monotonic()
    if instance.total_baskets > instance.num_trolleys * instance.trolley_capacity:
        raise InstanceError("workload exceeds fleet capacity")
    work = collapse_subaisles(instance) if config.no_reversal else instance
    spec = build_model(work, config.families, no_reversal=config.no_reversal)
    pool = CutPool(capacity=config.cut_pool_capacity)
    extra_rows: list = []
    rounds = 0
    root_bound = None

    def remaining() -> float | None:
        if config.time_limit is None:
            return None
        return config.time_limit - (time.monotonic() - start)

    if config.mode == "fbc":
        for _ in range(config.max_fractional_rounds):
            values, obj, _, _ = _solve_once(
                spec, extra_rows, True, remaining(), config.backend_options
            )
            root_bound = obj
            new_rows = []
            for t in spec.trolleys:
                for row in separate_fractional(spec, t, values):
                    new_rows.append(row)
                    comp = {
                        key[2]
                        for key, coef in row.coeffs.items()
                        if key[0] == "g"
                    }
                    rep = next(
                        key[2] for key in row.coeffs if key[0] == "y"
                    )
                    pool.add(comp, rep)
            new_rows.extend(pool.violated_rows(spec, values))
            seen = set()
            unique = []
            for row in new_rows:
                sig = (
                    tuple(sorted((repr(k), v) for k, v in row.coeffs.items())),
                    row.sense,
                    row.rhs,
                )
                if sig not in seen:
                    seen.add(sig)
                    unique.append(row)
            if not unique:
                break
            extra_rows.extend(unique)
            rounds += 1
    else:
        values, obj, _, _ = _solve_once(
            spec, extra_rows, True, remaining(), config.backend_options
        )
        root_bound = obj

    optimal = False
    values = None
    lower = root_bound
    for _ in range(config.max_rounds):
        budget = remaining()
        if budget is not None and budget <= 0:
            break
        values, obj, lower, solved = _solve_once(
            spec, extra_rows, False, budget, config.backend_options
        )
        rounds += 1
        new_rows = []
        for t in spec.trolleys:
            for comp, rep in integral_components(spec, t, values):
                new_rows.append(connectivity_row(spec, t, comp, rep))
                pool.add(comp, rep)
        if not new_rows:
            optimal = solved
            break
        extra_rows.extend(new_rows)
    else:
        raise SolveError("cut loop exceeded the round limit")
    if values is None:
        raise SolveError("time limit reached before a first solve completed")

    assignments, walks = _solution_from_values(spec, values)
    objective_ticks = sum(
        walk_length(work.graph, walk) for walk in walks.values()
    )
    row_counts: dict = {}
    for row in spec.rows:
        row_counts[row.family] = row_counts.get(row.family, 0) + 1
    row_counts["CONNECTIVITY"] = len(extra_rows)
    return Solution(
        assignments=assignments,
        walks=walks,
        objective_ticks=objective_ticks,
        lower_bound_ticks=min(lower, objective_ticks) if optimal else lower,
        root_bound_ticks=root_bound,
        optimal=optimal,
        rounds=rounds,
        connectivity_cuts=len(extra_rows),
        row_counts=row_counts,
        wall_time=time.monotonic() - start,
        mode=config.mode,
        families=tuple(config.families),
        no_reversal=config.no_reversal,
    )


def solve_routing(
    graph: PickingGraph,
    required,
    time_limit: float | None = None,
    families: tuple = ALL_FAMILIES,
    mode: str = "ibc",
) -> tuple:
    """Optimal single-trolley closed walk through ``required`` vertices.

    Returns ``(walk, length_ticks)``.  The graph is reduced to the required
    set first; the walk is expressed on the reduced graph.
    """
    required = sorted(set(required))
    if not required:
        return [ORIGIN], 0
    reduced = reduce_graph(graph, required)
    order = Order(id=1, lines=(("route", 1),))
    inst = Instance(
        graph=reduced,
        orders=[order],
        order_vertices={1: tuple(required)},
        trolley_capacity=1,
        num_trolleys=1,
        basket_item_capacity=1,
        name="routing",
    )
    sol = solve_jobprp(
        inst,
        SolveConfig(mode=mode, families=families, time_limit=time_limit),
    )
    walk = sol.walks.get(1, [ORIGIN])
    return walk, sol.objective_ticks
