import pytest
from hypothesis import given, strategies as st

from jobprp.warehouse import (
    EAST,
    WEST,
    LayoutConfig,
    LayoutError,
    WarehouseLayout,
    build_layout,
    make_catalog,
    metres_to_ticks,
    required_slots_per_shelf,
    subaisle_count,
    ticks_to_metres,
)


def test_default_shape_fixture():
    cfg = LayoutConfig(
        num_aisles=8, num_cross_aisles=3, num_shelves=3, min_products=1560
    )
    layout = build_layout(cfg, make_catalog(1560))
    assert layout.slots_per_shelf == 33
    assert layout.capacity == 1584
    assert subaisle_count(layout) == 16


def test_small_shape_fixture():
    cfg = LayoutConfig(
        num_aisles=3, num_cross_aisles=3, num_shelves=2, min_products=104
    )
    layout = build_layout(cfg, make_catalog(104))
    assert layout.slots_per_shelf == 9
    assert layout.capacity == 108
    assert layout.empty_slots == 4


def test_config_validation():
    with pytest.raises(LayoutError):
        LayoutConfig(num_aisles=0, num_cross_aisles=3, num_shelves=1, min_products=1)
    with pytest.raises(LayoutError):
        LayoutConfig(num_aisles=1, num_cross_aisles=1, num_shelves=1, min_products=1)
    with pytest.raises(LayoutError):
        LayoutConfig(
            num_aisles=1,
            num_cross_aisles=2,
            num_shelves=1,
            min_products=1,
            aisle_width=-1,
        )
    # geometry must be representable in 0.05 m steps
    with pytest.raises(LayoutError):
        LayoutConfig(
            num_aisles=1,
            num_cross_aisles=2,
            num_shelves=1,
            min_products=1,
            aisle_width=3.003,
        )


def test_tick_conversion_round_trip():
    assert metres_to_ticks(3.0) == 60
    assert metres_to_ticks(0.05) == 1
    assert ticks_to_metres(metres_to_ticks(17.35)) == 17.35
    with pytest.raises(LayoutError):
        metres_to_ticks(0.033)


def test_block_of_column_partitions_columns():
    cfg = LayoutConfig(
        num_aisles=2, num_cross_aisles=4, num_shelves=1, min_products=28
    )
    layout = build_layout(cfg, make_catalog(28))
    # 7 columns over 3 blocks: top blocks take the remainder
    assert layout.subaisle_slot_counts[0] == (3, 2, 2)
    seen = [layout.block_of_column(col) for col in range(1, 8)]
    assert seen == [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1), (3, 2)]
    with pytest.raises(LayoutError):
        layout.block_of_column(8)


def test_placement_is_sorted_and_dense():
    cfg = LayoutConfig(
        num_aisles=2, num_cross_aisles=2, num_shelves=1, min_products=8
    )
    catalog = make_catalog(8)
    layout = build_layout(cfg, catalog)
    assert len(layout.placement) == 8
    assert layout.empty_slots == 0
    # catalog ids are already in category order, so they fill west to east
    coords = [layout.placement[pid] for pid, _ in catalog]
    assert coords[0].aisle == 1 and coords[0].side == WEST
    assert coords[-1].aisle == 2 and coords[-1].side == EAST
    assert all(c.shelf == 1 for c in coords)


def test_build_layout_rejects_bad_catalogs():
    cfg = LayoutConfig(
        num_aisles=1, num_cross_aisles=2, num_shelves=1, min_products=2
    )
    with pytest.raises(LayoutError):
        build_layout(cfg, [])
    with pytest.raises(LayoutError):
        build_layout(cfg, [("A", (0,)), ("A", (1,))])
    with pytest.raises(LayoutError):
        build_layout(cfg, make_catalog(3))  # capacity is 2


def test_layout_json_round_trip():
    cfg = LayoutConfig(
        num_aisles=3, num_cross_aisles=3, num_shelves=2, min_products=50
    )
    layout = build_layout(cfg, make_catalog(50))
    again = WarehouseLayout.from_json(layout.to_json())
    assert again == layout


@given(
    aisles=st.integers(1, 6),
    crosses=st.integers(2, 5),
    shelves=st.integers(1, 4),
    products=st.integers(1, 400),
)
def test_generated_capacity_fits_catalog(aisles, crosses, shelves, products):
    cfg = LayoutConfig(
        num_aisles=aisles,
        num_cross_aisles=crosses,
        num_shelves=shelves,
        min_products=products,
    )
    n = required_slots_per_shelf(cfg)
    capacity = 2 * aisles * shelves * n
    assert capacity >= products
    # minimality: one fewer column per shelf would not fit
    assert 2 * aisles * shelves * (n - 1) < products
    layout = build_layout(cfg, make_catalog(products))
    assert layout.capacity == capacity
    assert layout.empty_slots == capacity - products
    assert sum(layout.subaisle_slot_counts[0]) == n
