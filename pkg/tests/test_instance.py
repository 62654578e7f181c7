import json
from datetime import date

import pytest
from hypothesis import given, strategies as st

from jobprp.instance import (
    Instance,
    InstanceError,
    Order,
    build_instance,
    combine_orders,
    compute_baskets,
    fleet_size,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    locate_orders,
    log_from_csv,
    log_to_csv,
    save_instance,
    synth_orders,
)

from conftest import make_tiny_instance


def test_basket_fixtures():
    assert compute_baskets(63) == 2
    assert compute_baskets(40) == 1
    assert compute_baskets(41) == 2
    assert compute_baskets(1) == 1


def test_fleet_fixtures():
    assert fleet_size(6, 8) == 1
    assert fleet_size(8, 8) == 2
    assert fleet_size(43, 8) == 6


@given(items=st.integers(1, 10_000), cap=st.integers(1, 100))
def test_baskets_bounds(items, cap):
    b = compute_baskets(items, cap)
    assert (b - 1) * cap < items <= b * cap


@given(baskets=st.integers(1, 10_000), cap=st.integers(1, 100))
def test_fleet_always_has_headroom(baskets, cap):
    t = fleet_size(baskets, cap)
    # the provisioned fleet covers the workload plus a fifth of a trolley
    assert 5 * t * cap >= 5 * baskets + cap
    assert 5 * (t - 1) * cap < 5 * baskets + cap


def test_order_validation():
    with pytest.raises(InstanceError):
        Order(id=1, lines=())
    with pytest.raises(InstanceError):
        Order(id=1, lines=(("A", 1), ("A", 2)))
    with pytest.raises(InstanceError):
        Order(id=1, lines=(("A", 0),))
    o = Order(id=1, lines=(("A", 2), ("B", 3)))
    assert o.items == 5
    assert o.products == ("A", "B")
    assert o.baskets() == 1


def test_instance_validation(tiny_layout):
    orders = [Order(id=1, lines=(("P00000", 100),))]
    inst = build_instance(tiny_layout, orders, trolley_capacity=8)
    assert inst.num_trolleys == fleet_size(3, 8)
    with pytest.raises(InstanceError):
        build_instance(tiny_layout, orders, trolley_capacity=1, num_trolleys=1)
    with pytest.raises(InstanceError):
        Instance(
            graph=inst.graph,
            orders=orders,
            order_vertices={1: (("col", 9, 9, 9),)},
            trolley_capacity=8,
            num_trolleys=1,
        )


def test_locate_orders_maps_products_to_columns(tiny_layout):
    o = Order(id=1, lines=(("P00000", 1), ("P00001", 1)))
    verts = locate_orders(tiny_layout, [o])
    assert verts[1]
    assert all(v[0] == "col" for v in verts[1])
    with pytest.raises(InstanceError):
        locate_orders(tiny_layout, [Order(id=2, lines=(("NOPE", 1),))])


def test_combine_orders_window_and_ordering():
    log = [
        ("alice", "2020-01-01", [("A", 1)]),
        ("alice", "2020-01-03", [("A", 2), ("B", 1)]),
        ("alice", "2020-01-20", [("C", 9)]),  # outside a 5-day window
        ("bob", "2020-02-01", [("D", 1), ("E", 1), ("F", 1)]),
    ]
    orders = combine_orders(log, window_days=5)
    assert len(orders) == 2
    # bob has more distinct products, so he comes first
    assert orders[0].customer == "bob"
    alice = orders[1]
    assert dict(alice.lines) == {"A": 3, "B": 1}
    with pytest.raises(InstanceError):
        combine_orders(log, window_days=0)


def test_synth_orders_deterministic():
    products = [f"P{i}" for i in range(20)]
    a = synth_orders(seed=5, num_customers=4, products=products)
    b = synth_orders(seed=5, num_customers=4, products=products)
    c = synth_orders(seed=6, num_customers=4, products=products)
    assert a == b
    assert a != c
    for customer, when, lines in a:
        assert isinstance(when, date)
        assert all(q >= 1 for _, q in lines)


def test_instance_round_trip(tmp_path):
    inst = make_tiny_instance(3)
    path = tmp_path / "inst.json"
    save_instance(inst, str(path))
    again = load_instance(str(path))
    assert instance_to_dict(again) == instance_to_dict(inst)


def test_header_tamper_detected(tmp_path):
    inst = make_tiny_instance(4)
    doc = instance_to_dict(inst)
    doc["header"]["total_baskets"] += 1
    with pytest.raises(InstanceError):
        instance_from_dict(doc)
    with pytest.raises(InstanceError):
        instance_from_dict({"format": "something-else"})


def test_log_csv_round_trip():
    products = [f"P{i}" for i in range(10)]
    log = synth_orders(seed=1, num_customers=3, products=products)
    text = log_to_csv(log)
    again = log_from_csv(text)
    norm = lambda rows: sorted(
        (c, w if isinstance(w, date) else date.fromisoformat(w), sorted(l))
        for c, w, l in rows
    )
    assert norm(again) == norm(log)
