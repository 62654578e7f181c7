import itertools
import random

import pytest

from jobprp.graph import ORIGIN, intersection
from jobprp.model import build_base_model, xvar, yvar
from jobprp.separation import (
    CutPool,
    FlowNetwork,
    integral_components,
    max_flow,
    retarget_row,
    separate_fractional,
)

from conftest import make_tiny_instance


def brute_force_min_cut(net: FlowNetwork) -> int:
    """Minimum source-side cut capacity by enumerating all vertex subsets."""
    others = [v for v in net.vertices if v not in (net.source, net.sink)]
    best = None
    for r in range(len(others) + 1):
        for subset in itertools.combinations(others, r):
            side = {net.source, *subset}
            cap = sum(
                c for (u, v), c in net.capacities.items()
                if u in side and v not in side
            )
            best = cap if best is None else min(best, cap)
    return best


def random_network(seed: int, max_vertices: int = 15) -> FlowNetwork:
    rng = random.Random(seed)
    n = rng.randint(2, max_vertices)
    net = FlowNetwork(source=0, sink=n - 1)
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < 0.3:
                net.add_arc(u, v, rng.randint(0, 20))
    net.add_arc(0, n - 1, rng.randint(0, 5))
    return net


@pytest.mark.parametrize("seed", range(40))
def test_max_flow_matches_enumeration(seed):
    net = random_network(seed, max_vertices=9)
    value, side = max_flow(net)
    assert value == brute_force_min_cut(net)
    assert net.source in side and net.sink not in side
    # the returned side is itself a minimum cut
    cap = sum(
        c for (u, v), c in net.capacities.items() if u in side and v not in side
    )
    assert cap == value


def test_flow_network_validation():
    with pytest.raises(ValueError):
        FlowNetwork(source=1, sink=1)
    with pytest.raises(ValueError):
        FlowNetwork(source=0, sink=1, capacities={(0, 1): -2})
    net = FlowNetwork(source=0, sink=1)
    with pytest.raises(ValueError):
        net.add_arc(0, 1, -1)


def test_integral_components_finds_detached_cycle():
    inst = make_tiny_instance(0)
    spec = build_base_model(inst)
    values = {key: 0.0 for key in spec.variables}
    a, b = intersection(1, 2), intersection(2, 2)
    values[xvar(1, a, b)] = 1.0
    values[xvar(1, b, a)] = 1.0
    comps = integral_components(spec, 1, values)
    assert comps == [({a, b}, min(a, b))]
    # a walk touching the origin produces no components
    values2 = {key: 0.0 for key in spec.variables}
    top = intersection(1, 1)
    values2[xvar(1, ORIGIN, top)] = 1.0
    values2[xvar(1, top, ORIGIN)] = 1.0
    assert integral_components(spec, 1, values2) == []


def test_separate_fractional_finds_disconnected_mass():
    inst = make_tiny_instance(0)
    spec = build_base_model(inst)
    values = {key: 0.0 for key in spec.variables}
    a, b = intersection(1, 2), intersection(2, 2)
    values[xvar(1, a, b)] = 0.5
    values[xvar(1, b, a)] = 0.5
    values[yvar(1, a)] = 0.5
    rows = separate_fractional(spec, 1, values)
    assert rows
    assert all(row.violation(values) > 0 for row in rows)
    # connecting the mass to the origin along real arcs yields nothing
    from jobprp.graph import shortest_path

    _, path = shortest_path(inst.graph, ORIGIN, a)
    for u, v in zip(path, path[1:]):
        values[xvar(1, u, v)] = 0.5
        values[xvar(1, v, u)] = 0.5
    assert separate_fractional(spec, 1, values) == []


def test_retarget_row_moves_trolley_index():
    inst = make_tiny_instance(0)
    spec = build_base_model(inst)
    from jobprp.model import connectivity_row

    comp = {intersection(1, 2), intersection(2, 2)}
    row = connectivity_row(spec, 1, comp, intersection(1, 2))
    moved = retarget_row(row, 2)
    assert all(key[1] == 2 for key in moved.coeffs)
    assert moved.sense == row.sense and moved.rhs == row.rhs
    assert len(moved.coeffs) == len(row.coeffs)


def test_cut_pool_dedup_lru_and_lookup():
    inst = make_tiny_instance(0)
    spec = build_base_model(inst)
    pool = CutPool(capacity=2)
    a, b, c = intersection(1, 2), intersection(2, 2), intersection(3, 2)
    pool.add({a, b}, a)
    pool.add({a, b}, a)  # duplicate
    assert len(pool) == 1
    pool.add({b, c}, b)
    pool.add({a, c}, a)  # evicts the oldest entry
    assert len(pool) == 2
    # the surviving {b, c} cut fires for trolley 2 even though it was
    # stored while separating another trolley
    values = {key: 0.0 for key in spec.variables}
    values[xvar(2, b, c)] = 1.0
    values[xvar(2, c, b)] = 1.0
    values[("g", 2, b)] = 1.0
    values[("g", 2, c)] = 1.0
    values[("y", 2, b)] = 1.0
    rows = pool.violated_rows(spec, values)
    assert rows
    assert any(all(key[1] == 2 for key in row.coeffs) for row in rows)
