"""Backend-agnostic integer program for joint batching and routing.

The base program minimises total walk length over per-trolley arc variables,
with order-to-trolley assignment, trolley capacity, flow conservation and
degree-linking rows.  Connectivity is NOT enumerated here — the engine adds
those rows lazily via the separation module.  On top of the base program,
seven independently toggleable families of layout-based inequalities
tighten the relaxation:

- ``symmetry``: trolley-index and walk-direction symmetry breaking;
- ``fcav``: what a trolley must do right after leaving / before re-entering
  the origin through a top-cross-aisle intersection;
- ``cross_aisle``: horizontal cut-crossing rows below and above each
  cross-aisle;
- ``aisle``: vertical cut-crossing rows between adjacent aisles;
- ``subaisle``: auxiliary per-vertex "reached from the north/south" bound
  variables with covering rows;
- ``avr``: no useless reversals at intersections or subaisle ends;
- ``pass_through``: trolleys not picking at a column vertex must pass it
  without turning around.

A separate transform collapses every subaisle to a single midpoint vertex
for the no-reversal variant, whose pairing equalities carry the ``NR`` tag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import (
    ORIGIN,
    PickingGraph,
    column,
    intersection,
    is_column,
    is_intersection,
)
from .instance import Instance, InstanceError

ALL_FAMILIES = (
    "symmetry",
    "fcav",
    "cross_aisle",
    "aisle",
    "subaisle",
    "avr",
    "pass_through",
)

SENSE_LE = "<="
SENSE_GE = ">="
SENSE_EQ = "=="


@dataclass(frozen=True)
class VarDef:
    lb: float
    ub: float
    integral: bool


@dataclass
class ConstraintRow:
    family: str
    coeffs: dict  # variable key -> coefficient
    sense: str
    rhs: float

    def violation(self, values: dict) -> float:
        """Positive amount by which ``values`` violates this row."""
        lhs = sum(c * values.get(k, 0.0) for k, c in self.coeffs.items())
        if self.sense == SENSE_LE:
            return max(0.0, lhs - self.rhs)
        if self.sense == SENSE_GE:
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass
class ModelSpec:
    instance: Instance
    variables: dict = field(default_factory=dict)  # key -> VarDef
    objective: dict = field(default_factory=dict)  # key -> coefficient (ticks)
    rows: list = field(default_factory=list)
    families: tuple = ()
    no_reversal: bool = False

    @property
    def trolleys(self) -> range:
        return range(1, self.instance.num_trolleys + 1)

    def add_row(self, family: str, coeffs: dict, sense: str, rhs: float) -> None:
        self.rows.append(ConstraintRow(family, coeffs, sense, rhs))

    def rows_by_family(self, family: str) -> list:
        return [r for r in self.rows if r.family == family]


# ---------------------------------------------------------------------------
# order geometry: which orders force crossings of layout cuts


@dataclass
class OrderGeometry:
    """Per-order location structure relative to the warehouse layout."""

    instance: Instance

    def _vertices(self, order_id: int) -> tuple:
        return self.instance.order_vertices[order_id]

    def orders_not_within_first_subaisle(self, aisle: int) -> list:
        """Orders that cannot be fully picked inside subaisle (aisle, 1)."""
        cols = set(self.instance.graph.subaisle_columns(aisle, 1))
        return [
            o.id
            for o in self.instance.orders
            if not set(self._vertices(o.id)) <= cols
        ]

    def orders_below_cross_aisle(self, cross: int) -> list:
        """Orders with a pick at or below the block under cross-aisle ``cross``."""
        return [
            o.id
            for o in self.instance.orders
            if any(v[2] >= cross for v in self._vertices(o.id))
        ]

    def orders_split_at_aisle(self, aisle: int) -> list:
        """Orders with picks strictly west of ``aisle`` and at/east of it."""
        result = []
        for o in self.instance.orders:
            aisles = {v[1] for v in self._vertices(o.id)}
            if any(a < aisle for a in aisles) and any(a >= aisle for a in aisles):
                result.append(o.id)
        return result

    def orders_at_vertex(self, vertex: tuple) -> list:
        """Orders with a pick located at ``vertex``."""
        return [
            o.id for o in self.instance.orders if vertex in self._vertices(o.id)
        ]


# ---------------------------------------------------------------------------
# variable keys


def xvar(t: int, i: tuple, j: tuple) -> tuple:
    return ("x", t, i, j)


def zvar(o: int, t: int) -> tuple:
    return ("z", o, t)


def avar(t: int) -> tuple:
    return ("alpha", t)


def yvar(t: int, i: tuple) -> tuple:
    return ("y", t, i)


def gvar(t: int, i: tuple) -> tuple:
    return ("g", t, i)


def mnvar(t: int, p: tuple) -> tuple:
    return ("MN", t, p)


def msvar(t: int, p: tuple) -> tuple:
    return ("MS", t, p)


# ---------------------------------------------------------------------------
# base program


def build_base_model(instance: Instance) -> ModelSpec:
    """Objective, capacity, assignment, touch, flow and linking rows."""
    g = instance.graph
    spec = ModelSpec(instance=instance)
    arcs = [(u, v) for u in g.adj for v in g.adj[u]]
    verts = list(g.adj)
    baskets = instance.baskets

    for t in spec.trolleys:
        for u, v in arcs:
            spec.variables[xvar(t, u, v)] = VarDef(0, 1, True)
            spec.objective[xvar(t, u, v)] = g.dist(u, v)
        for o in instance.orders:
            spec.variables[zvar(o.id, t)] = VarDef(0, 1, True)
        spec.variables[avar(t)] = VarDef(0, 1, False)
        for i in verts:
            spec.variables[yvar(t, i)] = VarDef(0, 1, False)
            spec.variables[gvar(t, i)] = VarDef(0, len(g.adj[i]), False)

    for t in spec.trolleys:
        # trolley capacity in baskets
        spec.add_row(
            "BASE_CAPACITY",
            {
                **{zvar(o.id, t): baskets[o.id] for o in instance.orders},
                avar(t): -instance.trolley_capacity,
            },
            SENSE_LE,
            0,
        )
        # every visited/assigned structure only on active trolleys
        for o in instance.orders:
            spec.add_row(
                "BASE_LINK", {zvar(o.id, t): 1, avar(t): -1}, SENSE_LE, 0
            )
        spec.add_row(
            "BASE_LINK",
            {
                **{zvar(o.id, t): 1 for o in instance.orders},
                avar(t): -1,
            },
            SENSE_GE,
            0,
        )
        # assigned order => some vertex holding it gets an outgoing arc
        for o in instance.orders:
            for i in instance.order_vertices[o.id]:
                spec.add_row(
                    "BASE_TOUCH",
                    {
                        **{xvar(t, i, j): 1 for j in g.adj[i]},
                        zvar(o.id, t): -1,
                    },
                    SENSE_GE,
                    0,
                )
        # flow conservation at every vertex
        for i in verts:
            coeffs: dict = {}
            for j in g.adj[i]:
                coeffs[xvar(t, i, j)] = coeffs.get(xvar(t, i, j), 0) + 1
                coeffs[xvar(t, j, i)] = coeffs.get(xvar(t, j, i), 0) - 1
            spec.add_row("BASE_FLOW", coeffs, SENSE_EQ, 0)
        # active trolley leaves and re-enters the origin exactly once
        spec.add_row(
            "BASE_SOURCE",
            {**{xvar(t, ORIGIN, j): 1 for j in g.adj[ORIGIN]}, avar(t): -1},
            SENSE_EQ,
            0,
        )
        spec.add_row(
            "BASE_SOURCE",
            {**{xvar(t, j, ORIGIN): 1 for j in g.adj[ORIGIN]}, avar(t): -1},
            SENSE_EQ,
            0,
        )
        for u, v in arcs:
            spec.add_row(
                "BASE_LINK", {xvar(t, u, v): 1, avar(t): -1}, SENSE_LE, 0
            )
        # outdegree bookkeeping and visit indicators
        for i in verts:
            spec.add_row(
                "BASE_DEGREE",
                {**{xvar(t, i, j): 1 for j in g.adj[i]}, gvar(t, i): -1},
                SENSE_EQ,
                0,
            )
            for j in g.adj[i]:
                spec.add_row(
                    "BASE_DEGREE",
                    {yvar(t, i): 1, xvar(t, i, j): -1},
                    SENSE_GE,
                    0,
                )
            spec.add_row(
                "BASE_LINK", {yvar(t, i): 1, avar(t): -1}, SENSE_LE, 0
            )

    # every order collected by exactly one trolley
    for o in instance.orders:
        spec.add_row(
            "BASE_ASSIGN",
            {zvar(o.id, t): 1 for t in spec.trolleys},
            SENSE_EQ,
            1,
        )
    return spec


def connectivity_row(
    spec: ModelSpec, t: int, component: Iterable[tuple], representative: tuple
) -> ConstraintRow:
    """Lazy row: a visited vertex set detached from the origin is forbidden
    unless the outdegree mass inside it exceeds its internal arc mass."""
    w = set(component)
    if ORIGIN in w or representative not in w:
        raise ValueError("component must exclude the origin and contain its rep")
    g = spec.instance.graph
    coeffs: dict = {yvar(t, representative): -1}
    for j in w:
        coeffs[gvar(t, j)] = coeffs.get(gvar(t, j), 0) + 1
        for k in g.adj[j]:
            if k in w:
                coeffs[xvar(t, j, k)] = coeffs.get(xvar(t, j, k), 0) - 1
    return ConstraintRow("CONNECTIVITY", coeffs, SENSE_GE, 0)


# ---------------------------------------------------------------------------
# reinforcement families


def add_symmetry(spec: ModelSpec) -> ModelSpec:
    inst = spec.instance
    g = inst.graph
    order_ids = sorted(o.id for o in inst.orders)
    # order k (in id order) must ride one of the first k trolleys
    for rank, oid in enumerate(order_ids[: inst.num_trolleys], start=1):
        spec.add_row(
            "SYM_ORDER",
            {zvar(oid, t): 1 for t in spec.trolleys if t <= rank},
            SENSE_GE,
            1,
        )
    # the minimum number of trolleys is known to be active
    min_trolleys = math.ceil(inst.total_baskets / inst.trolley_capacity)
    for t in range(1, min_trolleys + 1):
        spec.add_row("SYM_FORCE", {avar(t): 1}, SENSE_EQ, 1)
    # departure arc from the origin lies west of the return arc
    for t in spec.trolleys:
        for a in range(2, g.num_aisles + 1):
            coeffs: dict = {}
            for k in range(a, g.num_aisles + 1):
                coeffs[xvar(t, intersection(k, 1), ORIGIN)] = 1
                coeffs[xvar(t, ORIGIN, intersection(k, 1))] = -1
            spec.add_row("SYM_DIR", coeffs, SENSE_GE, 0)
    return spec


def add_fcav(spec: ModelSpec) -> ModelSpec:
    """First-intersection behaviour after leaving / before re-entering the
    origin: descend the subaisle below the entry intersection, and escape
    the first subaisle when the assigned orders need more than it offers."""
    inst = spec.instance
    g = inst.graph
    geo = OrderGeometry(inst)
    for t in spec.trolleys:
        for a in range(1, g.num_aisles + 1):
            chain = g.subaisle_chain(a, 1)
            top, first = chain[0], chain[1]
            last = chain[-2]  # deepest column, or the top intersection if none
            bottom = chain[-1]
            spec.add_row(
                "FCAV",
                {xvar(t, top, first): 1, xvar(t, ORIGIN, top): -1},
                SENSE_GE,
                0,
            )
            spec.add_row(
                "FCAV",
                {xvar(t, first, top): 1, xvar(t, top, ORIGIN): -1},
                SENSE_GE,
                0,
            )
            escape: dict = {xvar(t, last, bottom): 1}
            if a > 1:
                escape[xvar(t, top, intersection(a - 1, 1))] = 1
            if a < g.num_aisles:
                escape[xvar(t, top, intersection(a + 1, 1))] = 1
            for oid in geo.orders_not_within_first_subaisle(a):
                coeffs = dict(escape)
                coeffs[xvar(t, ORIGIN, top)] = coeffs.get(xvar(t, ORIGIN, top), 0) - 1
                coeffs[zvar(oid, t)] = -1
                spec.add_row("FCAV", coeffs, SENSE_GE, -1)
    return spec


def add_cross_aisle(spec: ModelSpec) -> ModelSpec:
    inst = spec.instance
    g = inst.graph
    geo = OrderGeometry(inst)
    for t in spec.trolleys:
        # cut just below cross-aisle c
        for c in range(1, g.num_cross_aisles):
            south = {}
            north = {}
            for a in range(1, g.num_aisles + 1):
                chain = g.subaisle_chain(a, c)
                south[xvar(t, chain[0], chain[1])] = 1
                north[xvar(t, chain[1], chain[0])] = 1
            for oid in geo.orders_below_cross_aisle(c):
                spec.add_row(
                    "CA_BELOW", {**south, zvar(oid, t): -1}, SENSE_GE, 0
                )
            spec.add_row(
                "CA_BELOW",
                {**north, **{k: -v for k, v in south.items()}},
                SENSE_EQ,
                0,
            )
        # cut just above cross-aisle c
        for c in range(2, g.num_cross_aisles + 1):
            south = {}
            north = {}
            for a in range(1, g.num_aisles + 1):
                chain = g.subaisle_chain(a, c - 1)
                south[xvar(t, chain[-2], chain[-1])] = 1
                north[xvar(t, chain[-1], chain[-2])] = 1
            for oid in geo.orders_below_cross_aisle(c):
                spec.add_row(
                    "CA_ABOVE", {**south, zvar(oid, t): -1}, SENSE_GE, 0
                )
            spec.add_row(
                "CA_ABOVE",
                {**north, **{k: -v for k, v in south.items()}},
                SENSE_EQ,
                0,
            )
    return spec


def add_aisle(spec: ModelSpec) -> ModelSpec:
    inst = spec.instance
    g = inst.graph
    geo = OrderGeometry(inst)
    for t in spec.trolleys:
        for a in range(2, g.num_aisles + 1):
            crossing: dict = {}
            for c in range(1, g.num_cross_aisles + 1):
                crossing[xvar(t, intersection(a - 1, c), intersection(a, c))] = 1
                crossing[xvar(t, intersection(a, c), intersection(a - 1, c))] = 1
            for oid in geo.orders_split_at_aisle(a):
                spec.add_row(
                    "AISLE", {**crossing, zvar(oid, t): -1}, SENSE_GE, 0
                )
    return spec


def add_subaisle(spec: ModelSpec) -> ModelSpec:
    """Per-vertex reachability bounds: a variable pair tracks the weakest
    arc on the unique path from each subaisle end to each column vertex."""
    inst = spec.instance
    g = inst.graph
    geo = OrderGeometry(inst)
    for t in spec.trolleys:
        for (a, c), cols in sorted(g.col_sequence.items()):
            if not cols:
                continue
            chain = g.subaisle_chain(a, c)
            for p in cols:
                spec.variables[mnvar(t, p)] = VarDef(0, 1, False)
                spec.variables[msvar(t, p)] = VarDef(0, 1, False)
            spec.add_row(
                "SUB",
                {mnvar(t, cols[0]): 1, xvar(t, chain[0], cols[0]): -1},
                SENSE_EQ,
                0,
            )
            spec.add_row(
                "SUB",
                {msvar(t, cols[-1]): 1, xvar(t, chain[-1], cols[-1]): -1},
                SENSE_EQ,
                0,
            )
            for prev, cur in zip(cols, cols[1:]):
                spec.add_row(
                    "SUB",
                    {mnvar(t, cur): 1, xvar(t, prev, cur): -1},
                    SENSE_LE,
                    0,
                )
                spec.add_row(
                    "SUB", {mnvar(t, cur): 1, mnvar(t, prev): -1}, SENSE_LE, 0
                )
                spec.add_row(
                    "SUB",
                    {msvar(t, prev): 1, xvar(t, cur, prev): -1},
                    SENSE_LE,
                    0,
                )
                spec.add_row(
                    "SUB", {msvar(t, prev): 1, msvar(t, cur): -1}, SENSE_LE, 0
                )
            for p in cols:
                for oid in geo.orders_at_vertex(p):
                    spec.add_row(
                        "SUB",
                        {mnvar(t, p): 1, msvar(t, p): 1, zvar(oid, t): -1},
                        SENSE_GE,
                        0,
                    )
    return spec


def add_avr(spec: ModelSpec) -> ModelSpec:
    """No pointless reversals: an arc into an intersection must be followed
    by an arc that does not simply go back where it came from."""
    g = spec.instance.graph
    for t in spec.trolleys:
        for k in g.adj:
            if not is_intersection(k):
                continue
            for i in g.adj[k]:
                if not is_intersection(i):
                    continue
                coeffs = {xvar(t, k, j): 1 for j in g.adj[k] if j != i}
                coeffs[xvar(t, i, k)] = -1
                spec.add_row("AVR", coeffs, SENSE_GE, 0)
        for (a, c), cols in sorted(g.col_sequence.items()):
            if not cols:
                continue
            top, bottom = intersection(a, c), intersection(a, c + 1)
            first, last = cols[0], cols[-1]
            spec.add_row(
                "AVR",
                {
                    **{xvar(t, top, j): 1 for j in g.adj[top] if j != first},
                    xvar(t, first, top): -1,
                },
                SENSE_GE,
                0,
            )
            spec.add_row(
                "AVR",
                {
                    **{xvar(t, j, top): 1 for j in g.adj[top] if j != first},
                    xvar(t, top, first): -1,
                },
                SENSE_GE,
                0,
            )
            spec.add_row(
                "AVR",
                {
                    **{xvar(t, bottom, j): 1 for j in g.adj[bottom] if j != last},
                    xvar(t, last, bottom): -1,
                },
                SENSE_GE,
                0,
            )
            spec.add_row(
                "AVR",
                {
                    **{xvar(t, j, bottom): 1 for j in g.adj[bottom] if j != last},
                    xvar(t, bottom, last): -1,
                },
                SENSE_GE,
                0,
            )
    return spec


def add_pass_through(spec: ModelSpec) -> ModelSpec:
    """A trolley with no pick at a column vertex must roll straight through."""
    inst = spec.instance
    g = inst.graph
    geo = OrderGeometry(inst)
    for t in spec.trolleys:
        for (a, c), cols in sorted(g.col_sequence.items()):
            chain = g.subaisle_chain(a, c)
            for idx in range(1, len(chain) - 1):
                prev, p, nxt = chain[idx - 1], chain[idx], chain[idx + 1]
                slack = {zvar(oid, t): 1 for oid in geo.orders_at_vertex(p)}
                for inc, out in ((prev, nxt), (nxt, prev)):
                    diff = {xvar(t, inc, p): 1, xvar(t, p, out): -1}
                    spec.add_row(
                        "PT",
                        {**diff, **{k: -v for k, v in slack.items()}},
                        SENSE_LE,
                        0,
                    )
                    spec.add_row(
                        "PT",
                        {**diff, **slack},
                        SENSE_GE,
                        0,
                    )
    return spec


def add_no_reversal_rows(spec: ModelSpec) -> ModelSpec:
    """Pairing equalities on a collapsed graph: any arc into a subaisle
    midpoint continues onward to the opposite cross-aisle."""
    g = spec.instance.graph
    for t in spec.trolleys:
        for (a, c), cols in sorted(g.col_sequence.items()):
            if not cols:
                continue
            if len(cols) != 1:
                raise InstanceError(
                    "no-reversal rows require collapsed single-vertex subaisles"
                )
            mid = cols[0]
            top, bottom = intersection(a, c), intersection(a, c + 1)
            spec.add_row(
                "NR",
                {xvar(t, top, mid): 1, xvar(t, mid, bottom): -1},
                SENSE_EQ,
                0,
            )
            spec.add_row(
                "NR",
                {xvar(t, bottom, mid): 1, xvar(t, mid, top): -1},
                SENSE_EQ,
                0,
            )
    spec.no_reversal = True
    return spec


_FAMILY_BUILDERS = {
    "symmetry": add_symmetry,
    "fcav": add_fcav,
    "cross_aisle": add_cross_aisle,
    "aisle": add_aisle,
    "subaisle": add_subaisle,
    "avr": add_avr,
    "pass_through": add_pass_through,
}


def build_model(
    instance: Instance,
    families: Sequence[str] = ALL_FAMILIES,
    no_reversal: bool = False,
) -> ModelSpec:
    unknown = set(families) - set(ALL_FAMILIES)
    if unknown:
        raise InstanceError(f"unknown inequality families: {sorted(unknown)}")
    spec = build_base_model(instance)
    for name in ALL_FAMILIES:
        if name in families:
            _FAMILY_BUILDERS[name](spec)
    if no_reversal:
        add_no_reversal_rows(spec)
    spec.families = tuple(name for name in ALL_FAMILIES if name in families)
    return spec


# ---------------------------------------------------------------------------
# no-reversal graph transform


def collapse_subaisles(instance: Instance) -> Instance:
    """Rebuild the instance with one midpoint vertex per non-empty subaisle.

    The midpoint can pick every item of its subaisle; empty subaisles become
    a single through arc.  The resulting instance is the input for the
    no-reversal variant of the model.
    """
    g = instance.graph
    out = PickingGraph(num_aisles=g.num_aisles, num_cross_aisles=g.num_cross_aisles)

    def add_arc(u, v, d):
        out.adj.setdefault(u, {})[v] = d
        out.adj.setdefault(v, {})[u] = d

    for u in g.adj:
        if is_column(u):
            continue
        out.adj.setdefault(u, {})
        out.coords[u] = g.coords[u]
        for v, d in g.adj[u].items():
            if not is_column(v):
                add_arc(u, v, d)

    vertex_map: dict = {}
    for (a, c), cols in sorted(g.col_sequence.items()):
        chain = g.subaisle_chain(a, c)
        total = sum(g.dist(u, v) for u, v in zip(chain, chain[1:]))
        top, bottom = chain[0], chain[-1]
        if not cols:
            add_arc(top, bottom, total)
            out.col_sequence[(a, c)] = ()
            continue
        mid = column(a, c, 1)
        add_arc(top, mid, total // 2)
        add_arc(mid, bottom, total - total // 2)
        out.col_sequence[(a, c)] = (mid,)
        tx, ty = g.coords[top]
        bx, by = g.coords[bottom]
        out.coords[mid] = ((tx + bx) / 2, (ty + by) / 2)
        pids = set()
        for v in cols:
            vertex_map[v] = mid
            pids.update(g.products_at.get(v, ()))
        out.products_at[mid] = pids
    out.check()

    order_vertices = {
        oid: tuple(sorted({vertex_map[v] for v in verts}))
        for oid, verts in instance.order_vertices.items()
    }
    return Instance(
        graph=out,
        orders=list(instance.orders),
        order_vertices=order_vertices,
        trolley_capacity=instance.trolley_capacity,
        num_trolleys=instance.num_trolleys,
        basket_item_capacity=instance.basket_item_capacity,
        name=instance.name + "-noreversal",
    )


# ---------------------------------------------------------------------------
# LP-format export


def _lp_name(key: tuple) -> str:
    def flat(part):
        if isinstance(part, tuple):
            return "_".join(flat(q) for q in part)
        return str(part)

    return flat(key).replace("-", "m")


def to_lp(spec: ModelSpec) -> str:
    """CPLEX-style LP text for cross-checking with external solvers."""
    lines = ["Minimize", " obj:"]
    terms = [
        f" {'+' if c >= 0 else '-'} {abs(c):g} {_lp_name(k)}"
        for k, c in spec.objective.items()
    ]
    lines.extend("   " + t for t in terms)
    lines.append("Subject To")
    for idx, row in enumerate(spec.rows):
        parts = [
            f"{'+' if c >= 0 else '-'} {abs(c):g} {_lp_name(k)}"
            for k, c in row.coeffs.items()
        ]
        op = {SENSE_LE: "<=", SENSE_GE: ">=", SENSE_EQ: "="}[row.sense]
        lines.append(f" r{idx}_{row.family}: {' '.join(parts)} {op} {row.rhs:g}")
    lines.append("Bounds")
    for k, vd in spec.variables.items():
        lines.append(f" {vd.lb:g} <= {_lp_name(k)} <= {vd.ub:g}")
    ints = [k for k, vd in spec.variables.items() if vd.integral]
    if ints:
        lines.append("Binaries" if all(
            spec.variables[k].lb == 0 and spec.variables[k].ub == 1 for k in ints
        ) else "Generals")
        lines.extend(f" {_lp_name(k)}" for k in ints)
    lines.append("End")
    return "\n".join(lines) + "\n"
