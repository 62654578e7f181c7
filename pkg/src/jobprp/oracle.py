"""Independent brute-force solver for tiny instances.

Ground truth for the whole test suite: every partition of the orders into
capacity-feasible batches is enumerated; each batch's optimal closed walk
is the optimal travelling-salesman tour over the shortest-path metric
closure of the origin plus the batch's required vertices, solved by
Held-Karp dynamic programming.  For symmetric nonnegative distances the
Steiner-walk optimum equals that metric-closure tour optimum, so no walk
search is needed.

Returned solutions are normalised so that they also satisfy the model's
symmetry-breaking rows: trolleys are numbered by their smallest order id
and each walk is oriented so its departure aisle is not east of its return
aisle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .graph import ORIGIN, dijkstra, expand_walk, walk_length
from .instance import Instance, InstanceError


class OracleError(ValueError):
    """Instance outside the safe enumeration limits."""


@dataclass(frozen=True)
class OracleLimits:
    max_orders: int = 6
    max_batch_vertices: int = 13
    max_trolleys: int = 3


@dataclass
class OracleSolution:
    objective_ticks: int
    assignments: dict  # trolley -> sorted order ids
    walks: dict  # trolley -> vertex list on the instance graph


def _partitions(items: list):
    """All set partitions of ``items`` (each block nonempty, unordered)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def held_karp_tour(dist: dict, start, others: list) -> tuple:
    """Optimal closed tour start -> all of others -> start on a metric.

    Returns (length, vertex order including start at both ends).
    """
    if not others:
        return 0, [start, start]
    n = len(others)
    full = (1 << n) - 1
    # best[(mask, i)] = (cost, predecessor state) for paths start->others[i]
    best = {}
    for i in range(n):
        best[(1 << i, i)] = (dist[start][others[i]], None)
    for mask in range(1, full + 1):
        for i in range(n):
            if not mask & (1 << i) or (mask, i) not in best:
                continue
            cost, _ = best[(mask, i)]
            for j in range(n):
                if mask & (1 << j):
                    continue
                nxt = (mask | (1 << j), j)
                cand = cost + dist[others[i]][others[j]]
                if nxt not in best or cand < best[nxt][0]:
                    best[nxt] = (cand, (mask, i))
    end_state = min(
        ((mask, i) for (mask, i) in best if mask == full),
        key=lambda st: best[st][0] + dist[others[st[1]]][start],
    )
    length = best[end_state][0] + dist[others[end_state[1]]][start]
    order = []
    state = end_state
    while state is not None:
        order.append(others[state[1]])
        state = best[state][1]
    order.reverse()
    return length, [start] + order + [start]


def oracle_route(instance_graph, required: list) -> tuple:
    """Optimal closed-walk length and walk through ``required`` vertices."""
    terminals = [ORIGIN] + sorted(set(required))
    dist = {}
    for u in terminals:
        d, _ = dijkstra(instance_graph, u)
        dist[u] = d
    length, tour = held_karp_tour(dist, ORIGIN, terminals[1:])
    walk = expand_walk(instance_graph, tour)
    if walk_length(instance_graph, walk) != length:
        raise OracleError("expanded walk length mismatch")
    arcs = list(zip(walk, walk[1:]))
    if len(set(arcs)) != len(arcs):
        raise OracleError("expanded walk repeats a directed arc")
    return length, walk


def oracle_solve(
    instance: Instance, limits: OracleLimits = OracleLimits()
) -> OracleSolution:
    orders = sorted(instance.orders, key=lambda o: o.id)
    if len(orders) > limits.max_orders:
        raise OracleError(f"more than {limits.max_orders} orders")
    if instance.num_trolleys > limits.max_trolleys:
        raise OracleError(f"more than {limits.max_trolleys} trolleys")
    baskets = instance.baskets
    cap = instance.trolley_capacity
    g = instance.graph

    route_cache: dict = {}

    def batch_route(batch: tuple) -> tuple:
        if batch not in route_cache:
            required = set()
            for oid in batch:
                required.update(instance.order_vertices[oid])
            if len(required) > limits.max_batch_vertices:
                raise OracleError(
                    f"batch needs more than {limits.max_batch_vertices} vertices"
                )
            route_cache[batch] = oracle_route(g, sorted(required))
        return route_cache[batch]

    best = None
    for partition in _partitions([o.id for o in orders]):
        if len(partition) > instance.num_trolleys:
            continue
        if any(sum(baskets[oid] for oid in block) > cap for block in partition):
            continue
        total = 0
        batches = [tuple(sorted(block)) for block in partition]
        for batch in batches:
            total += batch_route(batch)[0]
        if best is None or total < best[0]:
            best = (total, batches)
    if best is None:
        raise InstanceError("no capacity-feasible partition exists")

    total, batches = best
    batches = sorted(batches, key=min)
    assignments = {}
    walks = {}
    for t, batch in enumerate(batches, start=1):
        length, walk = batch_route(batch)
        assignments[t] = list(batch)
        walks[t] = _orient_walk(walk)
    return OracleSolution(
        objective_ticks=total, assignments=assignments, walks=walks
    )


def noreversal_route_bound(graph, required_mids: list) -> int:
    """Optimal-pass lower bound for a collapsed (one vertex per subaisle)
    graph where a visited subaisle must be traversed end to end.

    Dynamic program over (set of passed midpoints, last midpoint, exit
    end); connections between passes are shortest paths in the collapsed
    graph, which themselves may only cross midpoints fully.  Every feasible
    no-reversal walk decomposes into such passes, so the value returned is
    a valid lower bound on the no-reversal optimum (and in practice equals
    it).
    """
    from .graph import intersection, is_column

    mids = sorted(set(required_mids))
    if not mids:
        return 0
    ends = {}
    for m in mids:
        _, a, c, _ = m
        ends[m] = (intersection(a, c), intersection(a, c + 1))
    sources = {ORIGIN}
    for top, bottom in ends.values():
        sources.update((top, bottom))
    dist = {}
    for u in sorted(sources):
        d, _ = dijkstra(graph, u)
        dist[u] = d

    def pass_cost(m, entry):
        top, bottom = ends[m]
        return graph.dist(top, m) + graph.dist(m, bottom), (
            bottom if entry == top else top
        )

    n = len(mids)
    best = {}
    for i, m in enumerate(mids):
        for entry in ends[m]:
            cost, exit_v = pass_cost(m, entry)
            state = (1 << i, i, exit_v)
            cand = dist[ORIGIN][entry] + cost
            if state not in best or cand < best[state]:
                best[state] = cand
    full = (1 << n) - 1
    for mask in range(1, full + 1):
        for (m_mask, i, exit_v), cost in sorted(best.items()):
            if m_mask != mask:
                continue
            for j, m in enumerate(mids):
                if mask & (1 << j):
                    continue
                for entry in ends[m]:
                    pcost, new_exit = pass_cost(m, entry)
                    cand = cost + dist[exit_v][entry] + pcost
                    state = (mask | (1 << j), j, new_exit)
                    if state not in best or cand < best[state]:
                        best[state] = cand
    return min(
        cost + dist[exit_v][ORIGIN]
        for (mask, _, exit_v), cost in best.items()
        if mask == full
    )


def oracle_noreversal_bound(
    instance: Instance, limits: OracleLimits = OracleLimits()
) -> int:
    """Partition-enumerating lower bound for the no-reversal variant of an
    instance whose graph has already been collapsed."""
    orders = sorted(instance.orders, key=lambda o: o.id)
    if len(orders) > limits.max_orders:
        raise OracleError(f"more than {limits.max_orders} orders")
    baskets = instance.baskets
    cap = instance.trolley_capacity
    cache: dict = {}

    def batch_bound(batch: tuple) -> int:
        if batch not in cache:
            mids = set()
            for oid in batch:
                mids.update(instance.order_vertices[oid])
            cache[batch] = noreversal_route_bound(instance.graph, sorted(mids))
        return cache[batch]

    best = None
    for partition in _partitions([o.id for o in orders]):
        if len(partition) > instance.num_trolleys:
            continue
        if any(sum(baskets[oid] for oid in block) > cap for block in partition):
            continue
        total = sum(batch_bound(tuple(sorted(block))) for block in partition)
        if best is None or total < best:
            best = total
    if best is None:
        raise InstanceError("no capacity-feasible partition exists")
    return best


def _orient_walk(walk: list) -> list:
    """Reverse the walk when it departs east of where it returns, so the
    arc out of the origin is never east of the arc back in."""
    if len(walk) < 3:
        return walk
    out_aisle = walk[1][1]
    in_aisle = walk[-2][1]
    if in_aisle < out_aisle:
        return list(reversed(walk))
    return walk
