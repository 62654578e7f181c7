"""Batching and routing heuristics.

Routing estimators build a deterministic visiting sequence over the
required column vertices and realise it as a closed walk by splicing
shortest paths, so every estimate is the exact length of an explicit
feasible walk (hence an upper bound on the optimal route).  Four
estimators are provided — serpentine full-traversal ("s-shape"),
largest-gap entry, a per-subaisle greedy mix of the two ("combined") and
the mix with a reversed block order added ("combined-plus") — plus the
exact route solved by the engine.

Batching follows the pairwise time-savings rule: merge order clusters in
descending precomputed savings subject to trolley capacity; the savings
matrix is computed once and never recalculated as clusters grow.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .engine import SolveConfig, solve_jobprp, solve_routing
from .graph import ORIGIN, PickingGraph, expand_walk, walk_length
from .instance import Instance, InstanceError

ESTIMATORS = ("s_shape", "largest_gap", "combined", "combined_plus")


class HeuristicError(RuntimeError):
    pass


@dataclass
class HeuristicSolution:
    assignments: dict  # trolley -> sorted order ids
    walks: dict  # trolley -> vertex list
    value_ticks: int
    method: str

    @property
    def value(self) -> float:
        from .warehouse import ticks_to_metres

        return ticks_to_metres(self.value_ticks)


# ---------------------------------------------------------------------------
# routing estimators


def _group_by_subaisle(graph: PickingGraph, required) -> dict:
    """Required vertices per (aisle, block), in north-to-south chain order."""
    req = set(required)
    groups = {}
    for (a, c), cols in sorted(graph.col_sequence.items()):
        hit = [v for v in cols if v in req]
        if hit:
            groups[(a, c)] = hit
    missing = req - {v for cols in groups.values() for v in cols}
    if missing:
        raise HeuristicError(f"required vertices missing from graph: {missing}")
    return groups


def _finish(graph: PickingGraph, sequence: list) -> tuple:
    walk = expand_walk(graph, [ORIGIN] + sequence + [ORIGIN])
    return walk, walk_length(graph, walk)


def route_s_shape(graph: PickingGraph, required) -> tuple:
    """Serpentine: blocks top to bottom, aisle direction alternating per
    block, every pick subaisle swept fully in the travel direction."""
    groups = _group_by_subaisle(graph, required)
    sequence = []
    blocks = sorted({c for (_, c) in groups})
    for bi, c in enumerate(blocks):
        aisles = sorted({a for (a, cc) in groups if cc == c}, reverse=bi % 2 == 1)
        for ai, a in enumerate(aisles):
            cols = groups[(a, c)]
            sequence.extend(cols if ai % 2 == 0 else list(reversed(cols)))
    return _finish(graph, sequence)


def _gap_split(graph: PickingGraph, a: int, c: int, hit: list) -> tuple:
    """Split a subaisle's picks at its largest internal travel gap."""
    chain = graph.subaisle_chain(a, c)
    pos = {}
    acc = 0
    for u, v in zip(chain, chain[1:]):
        pos[u] = acc
        acc += graph.dist(u, v)
    pos[chain[-1]] = acc
    stops = [chain[0]] + hit + [chain[-1]]
    gaps = [pos[v] - pos[u] for u, v in zip(stops, stops[1:])]
    cut = max(range(len(gaps)), key=lambda i: (gaps[i], i))
    north = hit[:cut]
    south = hit[cut:]
    return north, south


def route_largest_gap(graph: PickingGraph, required) -> tuple:
    """Enter each pick subaisle only up to its largest gap: northern picks
    from the top cross-aisle, southern picks from the bottom one."""
    groups = _group_by_subaisle(graph, required)
    sequence = []
    blocks = sorted({c for (_, c) in groups})
    for c in blocks:
        aisles = sorted({a for (a, cc) in groups if cc == c})
        souths = []
        for a in aisles:
            north, south = _gap_split(graph, a, c, groups[(a, c)])
            sequence.extend(north)
            if south:
                souths.append(list(reversed(south)))
        for south in reversed(souths):
            sequence.extend(south)
    return _finish(graph, sequence)


def _combined_sequence(graph: PickingGraph, groups: dict, blocks: list) -> list:
    """Per-subaisle greedy choice between a full sweep and a gap split,
    evaluated by the realised incremental walk length."""
    sequence: list = []
    for bi, c in enumerate(blocks):
        aisles = sorted({a for (a, cc) in groups if cc == c}, reverse=bi % 2 == 1)
        for a in aisles:
            hit = groups[(a, c)]
            north, south = _gap_split(graph, a, c, hit)
            options = [hit, list(reversed(hit))]
            if north or south:
                options.append(north + list(reversed(south)))
            best = None
            for opt in options:
                _, length = _finish(graph, sequence + opt)
                if best is None or length < best[1]:
                    best = (opt, length)
            sequence = sequence + best[0]
    return sequence


def route_combined(graph: PickingGraph, required) -> tuple:
    groups = _group_by_subaisle(graph, required)
    blocks = sorted({c for (_, c) in groups})
    return _finish(graph, _combined_sequence(graph, groups, blocks))


def route_combined_plus(graph: PickingGraph, required) -> tuple:
    """The combined rule, additionally tried with the block order reversed;
    the shorter realised walk wins."""
    groups = _group_by_subaisle(graph, required)
    blocks = sorted({c for (_, c) in groups})
    first = _finish(graph, _combined_sequence(graph, groups, blocks))
    second = _finish(
        graph, _combined_sequence(graph, groups, list(reversed(blocks)))
    )
    return first if first[1] <= second[1] else second


_ROUTERS = {
    "s_shape": route_s_shape,
    "largest_gap": route_largest_gap,
    "combined": route_combined,
    "combined_plus": route_combined_plus,
}


def estimate_route(
    graph: PickingGraph,
    required,
    estimators=ESTIMATORS,
    exact: bool = False,
    time_limit: float | None = None,
) -> tuple:
    """Best (walk, length_ticks) over the enabled estimators.

    With ``exact=True`` the engine's optimal routing is used instead."""
    required = sorted(set(required))
    if not required:
        return [ORIGIN], 0
    if exact:
        return solve_routing(graph, required, time_limit=time_limit)
    best = None
    for name in estimators:
        walk, length = _ROUTERS[name](graph, required)
        if best is None or length < best[1]:
            best = (walk, length)
    return best


# ---------------------------------------------------------------------------
# savings batching


def savings_batch(instance: Instance, exact: bool = False) -> list:
    """Order clusters per trolley via pairwise time savings.

    Returns a list of sorted order-id tuples (at most one per trolley).
    Raises when no capacity-feasible clustering within the fleet exists
    under this greedy rule."""
    orders = sorted(instance.orders, key=lambda o: o.id)
    baskets = instance.baskets
    cap = instance.trolley_capacity
    graph = instance.graph

    def est(oids: tuple) -> int:
        req = set()
        for oid in oids:
            req.update(instance.order_vertices[oid])
        return estimate_route(graph, req, exact=exact)[1]

    single = {o.id: est((o.id,)) for o in orders}
    savings = {}
    for o1, o2 in itertools.combinations([o.id for o in orders], 2):
        savings[(o1, o2)] = single[o1] + single[o2] - est((o1, o2))

    cluster_of = {o.id: o.id for o in orders}
    members = {o.id: [o.id] for o in orders}
    load = {o.id: baskets[o.id] for o in orders}

    def merge(a: int, b: int) -> None:
        ra, rb = cluster_of[a], cluster_of[b]
        keep, drop = min(ra, rb), max(ra, rb)
        members[keep] = sorted(members[keep] + members[drop])
        load[keep] += load[drop]
        for oid in members[keep]:
            cluster_of[oid] = keep
        del members[drop], load[drop]

    ranked = sorted(savings.items(), key=lambda kv: (-kv[1], kv[0]))
    for (o1, o2), value in ranked:
        if value <= 0:
            break
        ra, rb = cluster_of[o1], cluster_of[o2]
        if ra != rb and load[ra] + load[rb] <= cap:
            merge(o1, o2)

    while len(members) > instance.num_trolleys:
        feasible = [
            ((o1, o2), value)
            for (o1, o2), value in ranked
            if cluster_of[o1] != cluster_of[o2]
            and load[cluster_of[o1]] + load[cluster_of[o2]] <= cap
        ]
        if not feasible:
            raise HeuristicError(
                "cannot pack orders into the fleet with pairwise merges"
            )
        (o1, o2), _ = max(feasible, key=lambda kv: (kv[1], [-x for x in kv[0]]))
        merge(o1, o2)
    return [tuple(block) for block in sorted(members.values(), key=min)]


# ---------------------------------------------------------------------------
# heuristic variants


def run_variant(
    instance: Instance, variant: str, time_limit: float | None = None
) -> HeuristicSolution:
    """Savings batching with three routing levels.

    (i) estimated routes end to end; (ii) same batches, final routes exact;
    (iii) exact routing inside the savings computation as well."""
    if variant not in ("i", "ii", "iii"):
        raise ValueError(f"unknown variant {variant!r}")
    exact_inside = variant == "iii"
    batches = savings_batch(instance, exact=exact_inside)
    assignments = {}
    walks = {}
    total = 0
    for t, batch in enumerate(batches, start=1):
        req = set()
        for oid in batch:
            req.update(instance.order_vertices[oid])
        exact_final = variant in ("ii", "iii")
        walk, length = estimate_route(
            instance.graph, req, exact=exact_final, time_limit=time_limit
        )
        assignments[t] = sorted(batch)
        walks[t] = walk
        total += length
    return HeuristicSolution(
        assignments=assignments,
        walks=walks,
        value_ticks=total,
        method=f"savings-{variant}",
    )


# ---------------------------------------------------------------------------
# arrival tradeoff


def rolling_k(
    instance: Instance,
    k: int,
    sequence=None,
    solve_config: SolveConfig | None = None,
) -> tuple:
    """Assign orders in arrival waves: solve the first ``k`` outstanding
    orders exactly with the remaining fleet, freeze the most loaded trolley
    (ties to the lowest index), repeat.

    Returns (total distance in ticks, list of (frozen order ids, ticks))."""
    if k < 1:
        raise ValueError("k must be >= 1")
    from .graph import reduce_graph

    pending = list(sequence if sequence is not None else sorted(
        o.id for o in instance.orders
    ))
    orders_by_id = {o.id: o for o in instance.orders}
    remaining_trolleys = instance.num_trolleys
    total = 0
    trace = []
    while pending:
        if remaining_trolleys == 0:
            raise InstanceError("fleet exhausted before all orders assigned")
        wave = pending[: min(k, len(pending))]
        req = set()
        for oid in wave:
            req.update(instance.order_vertices[oid])
        sub = Instance(
            graph=reduce_graph(instance.graph, req),
            orders=[orders_by_id[oid] for oid in wave],
            order_vertices={
                oid: instance.order_vertices[oid] for oid in wave
            },
            trolley_capacity=instance.trolley_capacity,
            num_trolleys=remaining_trolleys,
            basket_item_capacity=instance.basket_item_capacity,
            name=f"{instance.name}-wave",
        )
        sol = solve_jobprp(sub, solve_config or SolveConfig())
        baskets = sub.baskets
        t_star = max(
            sorted(sol.assignments),
            key=lambda t: (sum(baskets[o] for o in sol.assignments[t]), -t),
        )
        frozen = sol.assignments[t_star]
        length = walk_length(sub.graph, sol.walks[t_star])
        total += length
        trace.append((list(frozen), length))
        pending = [oid for oid in pending if oid not in set(frozen)]
        remaining_trolleys -= 1
    return total, trace
