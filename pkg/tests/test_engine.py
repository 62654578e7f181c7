import json

import pytest

from jobprp.engine import (
    BENCHMARK_COLUMNS,
    SolveConfig,
    SolveError,
    benchmark_row,
    extract_walk,
    solve_jobprp,
    solve_routing,
)
from jobprp.graph import ORIGIN, intersection, walk_length
from jobprp.oracle import oracle_solve

from conftest import make_tiny_instance


def test_solve_config_validation():
    with pytest.raises(ValueError):
        SolveConfig(mode="branchless")


def test_extract_walk_round_trip(tiny_instance):
    g = tiny_instance.graph
    top1, top2 = intersection(1, 1), intersection(2, 1)
    arcs = [(ORIGIN, top1), (top1, top2), (top2, ORIGIN)]
    walk = extract_walk(g, arcs)
    assert walk == [ORIGIN, top1, top2, ORIGIN]
    assert extract_walk(g, []) == [ORIGIN]


def test_extract_walk_rejects_bad_arc_sets(tiny_instance):
    g = tiny_instance.graph
    top1, top2, top3 = (intersection(a, 1) for a in (1, 2, 3))
    with pytest.raises(SolveError):  # unbalanced
        extract_walk(g, [(ORIGIN, top1)])
    with pytest.raises(SolveError):  # balanced but disconnected from origin
        extract_walk(
            g,
            [(ORIGIN, top1), (top1, ORIGIN), (top2, top3), (top3, top2)],
        )
    with pytest.raises(SolveError):  # does not touch the origin
        extract_walk(g, [(top1, top2), (top2, top1)])


def test_engine_matches_reference_and_is_normalisable():
    for seed in (11, 12, 13):
        inst = make_tiny_instance(seed)
        ref = oracle_solve(inst)
        sol = solve_jobprp(inst, SolveConfig(mode="ibc"))
        assert sol.optimal
        assert sol.objective_ticks == ref.objective_ticks
        assert sol.objective_ticks == sum(
            walk_length(inst.graph, w) for w in sol.walks.values()
        )
        covered = sorted(o for batch in sol.assignments.values() for o in batch)
        assert covered == sorted(o.id for o in inst.orders)
        for t, batch in sol.assignments.items():
            baskets = inst.baskets
            assert sum(baskets[o] for o in batch) <= inst.trolley_capacity
            for oid in batch:
                for v in inst.order_vertices[oid]:
                    assert v in sol.walks[t]
        assert sol.lower_bound_ticks <= sol.objective_ticks + 1e-6
        assert sol.root_bound_ticks <= sol.objective_ticks + 1e-6


def test_fbc_root_bound_not_worse_than_ibc():
    inst = make_tiny_instance(14)
    ibc = solve_jobprp(inst, SolveConfig(mode="ibc", families=()))
    fbc = solve_jobprp(inst, SolveConfig(mode="fbc", families=()))
    assert ibc.objective_ticks == fbc.objective_ticks
    # the fractional cutting loop can only raise the root bound
    assert fbc.root_bound_ticks >= ibc.root_bound_ticks - 1e-6


def test_solution_serialisation_and_benchmark_row():
    inst = make_tiny_instance(15)
    sol = solve_jobprp(inst, SolveConfig())
    doc = json.loads(sol.to_json())
    assert doc["optimal"] is True
    assert doc["objective_ticks"] == sol.objective_ticks
    assert set(doc["row_counts"]) >= {"BASE_FLOW", "CONNECTIVITY"}
    row = benchmark_row(inst.name, sol)
    assert tuple(row) == BENCHMARK_COLUMNS
    assert row["instance"] == inst.name
    assert float(row["UB"]) == pytest.approx(sol.objective)
    assert float(row["GAP"]) <= 0.1


def test_solve_routing_empty_and_single(tiny_instance):
    assert solve_routing(tiny_instance.graph, []) == ([ORIGIN], 0)
    v = tiny_instance.required_vertices[0]
    walk, length = solve_routing(tiny_instance.graph, [v])
    assert walk[0] == walk[-1] == ORIGIN
    assert v in walk
    from jobprp.graph import shortest_path

    assert length == 2 * shortest_path(tiny_instance.graph, ORIGIN, v)[0]


def test_time_limit_is_accepted():
    inst = make_tiny_instance(16)
    sol = solve_jobprp(inst, SolveConfig(time_limit=60.0))
    assert sol.optimal
