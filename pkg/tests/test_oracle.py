import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from jobprp.graph import ORIGIN, column, walk_length
from jobprp.instance import InstanceError, Order
from jobprp.model import collapse_subaisles
from jobprp.oracle import (
    OracleError,
    OracleLimits,
    _partitions,
    held_karp_tour,
    noreversal_route_bound,
    oracle_noreversal_bound,
    oracle_route,
    oracle_solve,
)

from conftest import make_tiny_instance


def bell(n: int) -> int:
    # Bell numbers via the triangle recurrence
    row = [1]
    for _ in range(n - 1):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[-1]


@pytest.mark.parametrize("n", range(1, 7))
def test_partition_count_is_bell_number(n):
    parts = list(_partitions(list(range(n))))
    assert len(parts) == bell(n)
    seen = set()
    for part in parts:
        assert sorted(x for block in part for x in block) == list(range(n))
        key = frozenset(frozenset(block) for block in part)
        assert key not in seen
        seen.add(key)


def brute_force_tour(dist, start, others):
    best = None
    for perm in itertools.permutations(others):
        seq = [start, *perm, start]
        length = sum(dist[u][v] for u, v in zip(seq, seq[1:]))
        best = length if best is None else min(best, length)
    return best


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 6))
def test_held_karp_matches_brute_force(seed, n):
    rng = random.Random(seed)
    verts = list(range(n + 1))
    # random symmetric metric via shortest paths over random weights
    raw = {
        (u, v): rng.randint(1, 50) for u in verts for v in verts if u < v
    }
    dist = {u: {u: 0} for u in verts}
    for (u, v), d in raw.items():
        dist[u][v] = dist[v][u] = d
    for k in verts:  # Floyd-Warshall to make it metric
        for u in verts:
            for v in verts:
                if dist[u][k] + dist[k][v] < dist[u][v]:
                    dist[u][v] = dist[u][k] + dist[k][v]
    length, tour = held_karp_tour(dist, 0, verts[1:])
    assert length == brute_force_tour(dist, 0, verts[1:])
    assert tour[0] == tour[-1] == 0
    assert sorted(tour[1:-1]) == verts[1:]
    assert sum(dist[u][v] for u, v in zip(tour, tour[1:])) == length


def test_oracle_route_single_vertex(tiny_layout):
    inst = make_tiny_instance(1)
    v = inst.required_vertices[0]
    length, walk = oracle_route(inst.graph, [v])
    assert walk[0] == walk[-1] == ORIGIN
    assert v in walk
    from jobprp.graph import shortest_path

    assert length == 2 * shortest_path(inst.graph, ORIGIN, v)[0]
    assert walk_length(inst.graph, walk) == length


def test_oracle_solution_is_normalised():
    for seed in range(10):
        inst = make_tiny_instance(seed)
        sol = oracle_solve(inst)
        baskets = inst.baskets
        covered = []
        for t in sorted(sol.assignments):
            batch = sol.assignments[t]
            assert sum(baskets[o] for o in batch) <= inst.trolley_capacity
            covered.extend(batch)
            walk = sol.walks[t]
            assert walk[0] == walk[-1] == ORIGIN
            # departure aisle is never east of the return aisle
            assert walk[1][1] <= walk[-2][1]
            for oid in batch:
                for v in inst.order_vertices[oid]:
                    assert v in walk
        assert sorted(covered) == sorted(o.id for o in inst.orders)
        # trolleys are numbered by their smallest order id
        mins = [min(sol.assignments[t]) for t in sorted(sol.assignments)]
        assert mins == sorted(mins)
        assert sol.objective_ticks == sum(
            walk_length(inst.graph, w) for w in sol.walks.values()
        )


def test_oracle_limits_enforced():
    inst = make_tiny_instance(0)
    with pytest.raises(OracleError):
        oracle_solve(inst, OracleLimits(max_orders=1))
    with pytest.raises(OracleError):
        oracle_solve(inst, OracleLimits(max_trolleys=1))
    with pytest.raises(OracleError):
        oracle_solve(inst, OracleLimits(max_batch_vertices=0))


def test_oracle_rejects_unpackable_orders(tiny_layout):
    orders = [
        Order(id=1, lines=(("P00000", 45),)),  # 2 baskets
        Order(id=2, lines=(("P00010", 45),)),
    ]
    from jobprp.instance import build_instance

    inst = build_instance(
        tiny_layout, orders, trolley_capacity=2, num_trolleys=2
    )
    # force both two-basket orders onto one single-trolley fleet
    inst.num_trolleys = 1
    with pytest.raises(InstanceError):
        oracle_solve(inst)


def test_noreversal_bound_empty_and_monotone():
    inst = make_tiny_instance(2)
    collapsed = collapse_subaisles(inst)
    assert noreversal_route_bound(collapsed.graph, []) == 0
    mids = sorted({v for vs in collapsed.order_vertices.values() for v in vs})
    one = noreversal_route_bound(collapsed.graph, mids[:1])
    all_of_them = noreversal_route_bound(collapsed.graph, mids)
    assert 0 < one <= all_of_them
    bound = oracle_noreversal_bound(collapsed)
    assert bound > 0
