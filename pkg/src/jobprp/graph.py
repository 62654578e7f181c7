"""Sparse directed picking graph over a warehouse layout.

Vertices are tuples:

- ``("origin",)`` — the picker start/return point,
- ``("int", a, c)`` — the intersection of aisle ``a`` and cross-aisle ``c``,
- ``("col", a, c, r)`` — the ``r``'th slot column in the subaisle of aisle
  ``a`` between cross-aisles ``c`` and ``c+1``; a picker standing there
  reaches the slots of both rack sides across all shelves.

Every arc has a reverse arc of equal length.  All distances are held in
integer ticks (0.05 m) so path arithmetic is exact.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .warehouse import (
    LayoutError,
    WarehouseLayout,
    metres_to_ticks,
    ticks_to_metres,
)

ORIGIN = ("origin",)

Vertex = tuple


def intersection(aisle: int, cross: int) -> Vertex:
    return ("int", aisle, cross)


def column(aisle: int, block: int, pos: int) -> Vertex:
    return ("col", aisle, block, pos)


def is_intersection(v: Vertex) -> bool:
    return v[0] == "int"


def is_column(v: Vertex) -> bool:
    return v[0] == "col"


@dataclass
class PickingGraph:
    """Immutable-after-build sparse graph with symmetric integer distances."""

    num_aisles: int
    num_cross_aisles: int
    adj: dict = field(default_factory=dict)  # vertex -> {neighbour: ticks}
    products_at: dict = field(default_factory=dict)  # column vertex -> set of ids
    coords: dict = field(default_factory=dict)  # vertex -> (x, y) metres
    # ordered retained column vertices per (aisle, block), north to south
    col_sequence: dict = field(default_factory=dict)

    @property
    def vertices(self) -> list:
        return sorted(self.adj)

    @property
    def arcs(self) -> list:
        return [(u, v) for u in sorted(self.adj) for v in sorted(self.adj[u])]

    def dist(self, u: Vertex, v: Vertex) -> int:
        return self.adj[u][v]

    def subaisle_chain(self, aisle: int, block: int) -> list:
        """Vertices of one subaisle: north intersection, columns, south one."""
        return (
            [intersection(aisle, block)]
            + list(self.col_sequence.get((aisle, block), ()))
            + [intersection(aisle, block + 1)]
        )

    def subaisle_columns(self, aisle: int, block: int) -> tuple:
        return tuple(self.col_sequence.get((aisle, block), ()))

    def check(self) -> None:
        for u, nbrs in self.adj.items():
            for v, d in nbrs.items():
                if d < 0:
                    raise LayoutError(f"negative arc length {u}->{v}")
                if self.adj.get(v, {}).get(u) != d:
                    raise LayoutError(f"asymmetric arc {u}<->{v}")
        seen = dijkstra(self, ORIGIN)[0]
        if len(seen) != len(self.adj):
            raise LayoutError("graph is not connected")


def _aisle_pitch_ticks(layout: WarehouseLayout) -> int:
    c = layout.config
    return metres_to_ticks(c.aisle_width) + 2 * metres_to_ticks(c.rack_depth)


def build_full_graph(layout: WarehouseLayout) -> PickingGraph:
    """Full picking graph: one column vertex per slot column of every subaisle."""
    c = layout.config
    aw = metres_to_ticks(c.aisle_width)
    cw = metres_to_ticks(c.cross_aisle_width)
    sw = metres_to_ticks(c.slot_width)
    offset = metres_to_ticks(c.origin_offset)
    pitch = _aisle_pitch_ticks(layout)

    g = PickingGraph(num_aisles=c.num_aisles, num_cross_aisles=c.num_cross_aisles)

    def add_arc(u: Vertex, v: Vertex, d: int) -> None:
        g.adj.setdefault(u, {})[v] = d
        g.adj.setdefault(v, {})[u] = d

    g.adj[ORIGIN] = {}
    g.coords[ORIGIN] = (-ticks_to_metres(offset), 0.0)
    for a in range(1, c.num_aisles + 1):
        x = ticks_to_metres((a - 1) * pitch)
        # origin reaches every intersection on the top cross-aisle; the
        # distance accumulates the horizontal offset along that cross-aisle
        add_arc(ORIGIN, intersection(a, 1), offset + (a - 1) * pitch)
        y = 0.0
        for blk in range(1, c.num_cross_aisles):
            g.coords[intersection(a, blk)] = (x, y)
            n_cols = layout.subaisle_slot_counts[a - 1][blk - 1]
            prev = intersection(a, blk)
            for r in range(1, n_cols + 1):
                v = column(a, blk, r)
                step = (cw + sw) // 2 if r == 1 else sw
                add_arc(prev, v, step)
                y_v = g.coords[prev][1] + ticks_to_metres(step)
                g.coords[v] = (x, y_v)
                prev = v
                y = y_v
            last_step = (cw + sw) // 2 if n_cols else cw
            add_arc(prev, intersection(a, blk + 1), last_step)
            y += ticks_to_metres(last_step)
            g.col_sequence[(a, blk)] = tuple(
                column(a, blk, r) for r in range(1, n_cols + 1)
            )
        g.coords[intersection(a, c.num_cross_aisles)] = (x, y)
    for cc in range(1, c.num_cross_aisles + 1):
        for a in range(1, c.num_aisles):
            add_arc(intersection(a, cc), intersection(a + 1, cc), pitch)

    for pid, slot in layout.placement.items():
        blk, pos = layout.block_of_column(slot.column)
        g.products_at.setdefault(column(slot.aisle, blk, pos), set()).add(pid)
    g.check()
    return g


def reduce_graph(g: PickingGraph, required: Iterable[Vertex]) -> PickingGraph:
    """Drop unneeded column vertices, splicing their chain arcs together.

    Intersections and the origin are always retained.  Distances between
    retained vertices are preserved exactly.
    """
    keep = set(required)
    for v in keep:
        if not is_column(v) or v not in g.adj:
            raise LayoutError(f"required vertex {v} is not a column of the graph")

    out = PickingGraph(num_aisles=g.num_aisles, num_cross_aisles=g.num_cross_aisles)
    out.adj = {
        u: dict(nbrs)
        for u, nbrs in g.adj.items()
        if not is_column(u)
    }
    out.coords = dict(g.coords)
    # strip column arcs from retained intersections, then rebuild each chain
    for u in out.adj:
        out.adj[u] = {v: d for v, d in out.adj[u].items() if not is_column(v)}

    def add_arc(u: Vertex, v: Vertex, d: int) -> None:
        out.adj.setdefault(u, {})[v] = d
        out.adj.setdefault(v, {})[u] = d

    for (a, blk), cols in g.col_sequence.items():
        chain = g.subaisle_chain(a, blk)
        kept_cols = tuple(v for v in cols if v in keep)
        out.col_sequence[(a, blk)] = kept_cols
        prev = chain[0]
        acc = 0
        for u, v in zip(chain, chain[1:]):
            acc += g.dist(u, v)
            if v in keep or v == chain[-1]:
                add_arc(prev, v, acc)
                prev, acc = v, 0
    for v in keep:
        out.products_at[v] = set(g.products_at.get(v, ()))
        if v not in out.coords:
            out.coords[v] = g.coords[v]
    out.coords = {v: out.coords[v] for v in out.adj}
    out.check()
    return out


def dijkstra(g: PickingGraph, source: Vertex) -> tuple[dict, dict]:
    """Shortest distances and predecessors from ``source``.

    Ties in distance are broken by preferring paths with fewer arcs, then by
    smaller predecessor vertex, making the chosen paths deterministic and
    free of zig-zags across equal-length cross-aisle detours.
    """
    best: dict = {}
    pred: dict = {source: None}
    heap = [(0, 0, source, None)]
    while heap:
        d, hops, u, p = heapq.heappop(heap)
        if u in best:
            continue
        best[u] = d
        pred[u] = p
        for v, w in sorted(g.adj[u].items()):
            if v not in best:
                heapq.heappush(heap, (d + w, hops + 1, v, u))
    return best, pred


def shortest_path(g: PickingGraph, u: Vertex, v: Vertex) -> tuple[int, list]:
    dist, pred = dijkstra(g, u)
    path = [v]
    while path[-1] != u:
        path.append(pred[path[-1]])
    path.reverse()
    return dist[v], path


def metric_closure(g: PickingGraph, terminals: Sequence[Vertex]) -> dict:
    """All-pairs shortest-path distances (ticks) between the terminals."""
    terminals = list(terminals)
    closure: dict = {}
    for u in terminals:
        dist, _ = dijkstra(g, u)
        closure[u] = {v: dist[v] for v in terminals}
    return closure


def walk_length(g: PickingGraph, walk: Sequence[Vertex]) -> int:
    return sum(g.dist(u, v) for u, v in zip(walk, walk[1:]))


def expand_walk(g: PickingGraph, vertex_sequence: Sequence[Vertex]) -> list:
    """Closed walk through the sequence, via deterministic shortest paths."""
    walk = [vertex_sequence[0]]
    for target in vertex_sequence[1:]:
        if target == walk[-1]:
            continue
        _, path = shortest_path(g, walk[-1], target)
        walk.extend(path[1:])
    return walk


def to_dot(g: PickingGraph) -> str:
    """Undirected DOT rendering (one edge per symmetric arc pair)."""
    lines = ["graph picking {"]
    for v in g.vertices:
        x, y = g.coords[v]
        shape = "box" if is_intersection(v) else ("doublecircle" if v == ORIGIN else "circle")
        lines.append(f'  "{v}" [shape={shape}, pos="{x},{-y}!"];')
    done = set()
    for u in g.vertices:
        for v, d in sorted(g.adj[u].items()):
            if (v, u) in done:
                continue
            done.add((u, v))
            lines.append(f'  "{u}" -- "{v}" [label="{ticks_to_metres(d):g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dict(g: PickingGraph) -> dict:
    verts = g.vertices
    return {
        "num_aisles": g.num_aisles,
        "num_cross_aisles": g.num_cross_aisles,
        "vertices": [list(v) for v in verts],
        "arcs": [
            [list(u), list(v), g.adj[u][v]]
            for u in verts
            for v in sorted(g.adj[u])
            if u < v
        ],
        "coords": {repr(v): list(g.coords[v]) for v in verts},
        "products_at": {
            repr(v): sorted(pids) for v, pids in sorted(g.products_at.items())
        },
        "col_sequence": [
            [a, blk, [list(v) for v in cols]]
            for (a, blk), cols in sorted(g.col_sequence.items())
        ],
    }


def graph_from_dict(data: Mapping) -> PickingGraph:
    g = PickingGraph(
        num_aisles=int(data["num_aisles"]),
        num_cross_aisles=int(data["num_cross_aisles"]),
    )
    for raw in data["vertices"]:
        g.adj[tuple(raw)] = {}
    for raw_u, raw_v, d in data["arcs"]:
        u, v = tuple(raw_u), tuple(raw_v)
        g.adj[u][v] = int(d)
        g.adj[v][u] = int(d)
    for key, xy in data["coords"].items():
        g.coords[_parse_vertex(key)] = (float(xy[0]), float(xy[1]))
    for key, pids in data["products_at"].items():
        g.products_at[_parse_vertex(key)] = set(pids)
    for a, blk, cols in data["col_sequence"]:
        g.col_sequence[(int(a), int(blk))] = tuple(tuple(v) for v in cols)
    g.check()
    return g


def _parse_vertex(text: str) -> Vertex:
    import ast

    v = ast.literal_eval(text)
    if not isinstance(v, tuple):
        raise LayoutError(f"bad vertex key {text!r}")
    return v
