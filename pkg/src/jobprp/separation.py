"""Lazy connectivity enforcement.

Integral candidate solutions are checked with a depth-first search on the
support graph of positive arc variables; every component not containing the
origin yields one connectivity row.  Fractional points are separated by a
min-cut computation (push-relabel max-flow) on the support network: a
candidate vertex whose visit value exceeds its min-cut from the origin
exposes a violated row on the origin-free side of the cut.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .graph import ORIGIN
from .model import ConstraintRow, ModelSpec, connectivity_row, gvar, xvar, yvar

EPSILON = 1e-6
CAPACITY_SCALE = 10**6


def integral_components(spec: ModelSpec, t: int, values: Mapping) -> list:
    """Connected components of trolley ``t``'s support graph that miss the
    origin, each as (component vertex set, representative vertex).

    The representative is the smallest visited vertex of the component."""
    g = spec.instance.graph
    support: dict = {}
    for u in g.adj:
        for v in g.adj[u]:
            if values.get(xvar(t, u, v), 0.0) > 0.5:
                support.setdefault(u, set()).add(v)
                support.setdefault(v, set()).add(u)
    seen: set = set()
    result = []
    for start in sorted(support):
        if start in seen:
            continue
        stack, comp = [start], set()
        while stack:
            u = stack.pop()
            if u in comp:
                continue
            comp.add(u)
            stack.extend(support[u] - comp)
        seen |= comp
        if ORIGIN not in comp:
            result.append((comp, min(comp)))
    return result


# ---------------------------------------------------------------------------
# max flow


@dataclass
class FlowNetwork:
    """Directed network with nonnegative capacities."""

    source: object
    sink: object
    capacities: dict = field(default_factory=dict)  # (u, v) -> capacity

    def __post_init__(self) -> None:
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        for arc, cap in self.capacities.items():
            if cap < 0:
                raise ValueError(f"negative capacity on {arc}")

    def add_arc(self, u, v, capacity) -> None:
        if capacity < 0:
            raise ValueError("negative capacity")
        self.capacities[(u, v)] = self.capacities.get((u, v), 0) + capacity

    @property
    def vertices(self) -> list:
        verts = {self.source, self.sink}
        for u, v in self.capacities:
            verts.add(u)
            verts.add(v)
        return sorted(verts, key=repr)


def max_flow(net: FlowNetwork) -> tuple:
    """Push-relabel max flow; returns (value, source-side min-cut set).

    Capacities are used as given (callers pass integers for exactness).
    The returned set contains every vertex reachable from the source in the
    final residual network, so the arcs leaving it are saturated and their
    capacity total equals the flow value.
    """
    verts = net.vertices
    n = len(verts)
    index = {v: i for i, v in enumerate(verts)}
    s, t = index[net.source], index[net.sink]

    residual = [dict() for _ in range(n)]
    for (u, v), cap in net.capacities.items():
        iu, iv = index[u], index[v]
        if iu == iv or cap == 0:
            continue
        residual[iu][iv] = residual[iu].get(iv, 0) + cap
        residual[iv].setdefault(iu, 0)

    height = [0] * n
    excess = [0] * n
    height[s] = n
    for v, cap in list(residual[s].items()):
        if cap > 0:
            residual[s][v] -= cap
            residual[v][s] = residual[v].get(s, 0) + cap
            excess[v] += cap
            excess[s] -= cap

    active = [v for v in range(n) if v not in (s, t) and excess[v] > 0]
    while active:
        u = active.pop()
        while excess[u] > 0:
            pushed = False
            for v in sorted(residual[u]):
                cap = residual[u][v]
                if cap > 0 and height[u] == height[v] + 1:
                    amount = min(excess[u], cap)
                    residual[u][v] -= amount
                    residual[v][u] = residual[v].get(u, 0) + amount
                    excess[u] -= amount
                    excess[v] += amount
                    if v not in (s, t) and excess[v] > 0 and v not in active:
                        active.append(v)
                    pushed = True
                    if excess[u] == 0:
                        break
            if excess[u] > 0 and not pushed:
                candidates = [
                    height[v] for v, cap in residual[u].items() if cap > 0
                ]
                if not candidates:
                    break
                height[u] = 1 + min(candidates)

    value = excess[t]
    reach = {s}
    stack = [s]
    while stack:
        u = stack.pop()
        for v, cap in residual[u].items():
            if cap > 0 and v not in reach:
                reach.add(v)
                stack.append(v)
    return value, {verts[i] for i in reach}


# ---------------------------------------------------------------------------
# fractional separation


def separate_fractional(spec: ModelSpec, t: int, values: Mapping) -> list:
    """Violated connectivity rows for trolley ``t`` at a fractional point.

    Candidate vertices with positive visit value are examined in descending
    visit value; for each, the min cut separating it from the origin on the
    support network (capacities = arc values) is compared against the visit
    value.  Vertices already inside an emitted cut this round are skipped.
    """
    g = spec.instance.graph
    support_arcs = {}
    for u in g.adj:
        for v in g.adj[u]:
            val = values.get(xvar(t, u, v), 0.0)
            if val > EPSILON:
                support_arcs[(u, v)] = val
    candidates = sorted(
        (
            (values.get(yvar(t, i), 0.0), i)
            for i in g.adj
            if i != ORIGIN and values.get(yvar(t, i), 0.0) > EPSILON
        ),
        key=lambda item: (-item[0], repr(item[1])),
    )
    rows = []
    covered: set = set()
    for yval, i in candidates:
        if i in covered:
            continue
        net = FlowNetwork(source=i, sink=ORIGIN)
        net.capacities[(i, ORIGIN)] = 0
        for (u, v), val in support_arcs.items():
            net.add_arc(u, v, round(val * CAPACITY_SCALE))
        cut_value, side = max_flow(net)
        if cut_value < round(yval * CAPACITY_SCALE) - CAPACITY_SCALE * EPSILON:
            component = side - {ORIGIN}
            rows.append(connectivity_row(spec, t, component, i))
            covered |= component
    return rows


def retarget_row(row: ConstraintRow, t: int) -> ConstraintRow:
    """The same connectivity cut, re-indexed for another trolley."""
    coeffs = {}
    for key, coeff in row.coeffs.items():
        coeffs[(key[0], t) + key[2:]] = coeff
    return ConstraintRow(row.family, coeffs, row.sense, row.rhs)


class CutPool:
    """Bounded LRU store of connectivity cuts, shared across trolleys.

    Cuts are keyed by their vertex set and representative so the same set is
    never stored twice; retargeting to another trolley happens at lookup.
    """

    def __init__(self, capacity: int = 2000) -> None:
        self.capacity = capacity
        self._pool: OrderedDict = OrderedDict()

    def __len__(self) -> int:
        return len(self._pool)

    @staticmethod
    def _key(component: Iterable, representative) -> tuple:
        return (tuple(sorted(map(repr, component))), repr(representative))

    def add(self, component: Iterable, representative) -> None:
        key = self._key(component, representative)
        if key in self._pool:
            self._pool.move_to_end(key)
            return
        self._pool[key] = (frozenset(component), representative)
        while len(self._pool) > self.capacity:
            self._pool.popitem(last=False)

    def violated_rows(self, spec: ModelSpec, values: Mapping, tol: float = EPSILON) -> list:
        """Rows of pooled cuts violated by ``values`` for any trolley."""
        rows = []
        for component, rep in self._pool.values():
            for t in spec.trolleys:
                row = connectivity_row(spec, t, component, rep)
                if row.violation(values) > tol:
                    rows.append(row)
        return rows
