"""Shared fixtures: deterministic tiny instances small enough for the
brute-force reference solver."""

from __future__ import annotations

import random

import pytest

from jobprp.instance import Order, build_instance
from jobprp.warehouse import LayoutConfig, build_layout, make_catalog

TINY_LAYOUT = LayoutConfig(
    num_aisles=3,
    num_cross_aisles=3,
    num_shelves=1,
    min_products=36,
    origin_offset=2.0,
)


@pytest.fixture(scope="session")
def tiny_layout():
    return build_layout(TINY_LAYOUT, make_catalog(TINY_LAYOUT.min_products))


def make_tiny_instance(seed: int, layout=None):
    """Random instance with 2-4 single-basket orders on the 3x3 layout.

    Small enough for exhaustive solving: at most 12 required vertices and
    a fleet of 2 trolleys.
    """
    layout = layout or build_layout(
        TINY_LAYOUT, make_catalog(TINY_LAYOUT.min_products)
    )
    rng = random.Random(seed)
    pids = sorted(layout.placement)
    num_orders = rng.randint(2, 4)
    orders = []
    for oid in range(1, num_orders + 1):
        k = rng.randint(1, 3)
        chosen = sorted(rng.sample(pids, k))
        lines = tuple((pid, rng.randint(1, 12)) for pid in chosen)
        orders.append(Order(id=oid, lines=lines))
    capacity = rng.choice([2, 3, 4])
    return build_instance(
        layout,
        orders,
        trolley_capacity=capacity,
        num_trolleys=2,
        name=f"tiny-{seed}",
    )


@pytest.fixture
def tiny_instance(tiny_layout):
    return make_tiny_instance(0, tiny_layout)
