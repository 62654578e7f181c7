"""Orders, trolley fleets and instance generation/serialization.

An instance couples a reduced picking graph with a list of orders, the
per-order basket counts, the trolley capacity ``B`` (baskets per trolley)
and the fleet size ``T``.  Instances round-trip losslessly through a single
JSON document (``*.jobprp.json``) that carries explicit graph distances, so
solving never depends on re-deriving geometry.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass, field
from datetime import date, timedelta
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .graph import (
    PickingGraph,
    build_full_graph,
    column,
    graph_from_dict,
    graph_to_dict,
    reduce_graph,
)
from .warehouse import WarehouseLayout

DEFAULT_BASKET_ITEM_CAPACITY = 40


class InstanceError(ValueError):
    """Raised for malformed or infeasible instances."""


def compute_baskets(items: int, capacity: int = DEFAULT_BASKET_ITEM_CAPACITY) -> int:
    """Baskets needed for an order of ``items`` items."""
    if items < 1 or capacity < 1:
        raise InstanceError("items and capacity must be positive")
    return math.ceil(items / capacity)


def fleet_size(total_baskets: int, trolley_capacity: int) -> int:
    """Trolleys provisioned for a workload: ceil(baskets/capacity + 0.2).

    Exact rational arithmetic avoids float boundary errors such as
    ceil(8/8 + 0.2) evaluating to 1.
    """
    if total_baskets < 1 or trolley_capacity < 1:
        raise InstanceError("inputs must be positive")
    return math.ceil(Fraction(total_baskets, trolley_capacity) + Fraction(1, 5))


@dataclass(frozen=True)
class Order:
    id: int
    lines: tuple  # ((product_id, qty), ...)
    customer: str = ""

    def __post_init__(self) -> None:
        if not self.lines:
            raise InstanceError(f"order {self.id} has no lines")
        pids = [pid for pid, _ in self.lines]
        if len(pids) != len(set(pids)):
            raise InstanceError(f"order {self.id} has duplicate product lines")
        if any(q < 1 for _, q in self.lines):
            raise InstanceError(f"order {self.id} has nonpositive quantities")

    @property
    def items(self) -> int:
        return sum(q for _, q in self.lines)

    @property
    def products(self) -> tuple:
        return tuple(pid for pid, _ in self.lines)

    def baskets(self, capacity: int = DEFAULT_BASKET_ITEM_CAPACITY) -> int:
        return compute_baskets(self.items, capacity)


@dataclass
class Instance:
    graph: PickingGraph  # reduced graph
    orders: list  # list[Order]
    order_vertices: dict  # order id -> tuple of column vertices
    trolley_capacity: int  # B, baskets per trolley
    num_trolleys: int  # T
    basket_item_capacity: int = DEFAULT_BASKET_ITEM_CAPACITY
    name: str = "instance"

    def __post_init__(self) -> None:
        if self.num_trolleys < 1 or self.trolley_capacity < 1:
            raise InstanceError("fleet and capacity must be positive")
        for o in self.orders:
            verts = self.order_vertices.get(o.id)
            if not verts:
                raise InstanceError(f"order {o.id} has no picking vertices")
            for v in verts:
                if v not in self.graph.adj:
                    raise InstanceError(f"order {o.id} requires missing vertex {v}")
        if self.total_baskets > self.num_trolleys * self.trolley_capacity:
            raise InstanceError(
                f"{self.total_baskets} baskets exceed fleet capacity "
                f"{self.num_trolleys}x{self.trolley_capacity}"
            )

    @property
    def baskets(self) -> dict:
        return {o.id: o.baskets(self.basket_item_capacity) for o in self.orders}

    @property
    def total_baskets(self) -> int:
        return sum(self.baskets.values())

    @property
    def required_vertices(self) -> list:
        req = set()
        for verts in self.order_vertices.values():
            req.update(verts)
        return sorted(req)

    def summary(self) -> dict:
        verts = self.graph.vertices
        num_arcs = sum(len(n) for n in self.graph.adj.values())
        return {
            "orders": len(self.orders),
            "total_baskets": self.total_baskets,
            "num_trolleys": self.num_trolleys,
            "num_vertices": len(verts),
            "num_arcs": num_arcs,
        }


def locate_orders(layout: WarehouseLayout, orders: Sequence[Order]) -> dict:
    """Map each order to the sorted set of column vertices holding its products."""
    order_vertices = {}
    for o in orders:
        verts = set()
        for pid in o.products:
            slot = layout.placement.get(pid)
            if slot is None:
                raise InstanceError(f"product {pid!r} of order {o.id} is not placed")
            blk, pos = layout.block_of_column(slot.column)
            verts.add(column(slot.aisle, blk, pos))
        order_vertices[o.id] = tuple(sorted(verts))
    return order_vertices


def build_instance(
    layout: WarehouseLayout,
    orders: Sequence[Order],
    trolley_capacity: int = 8,
    basket_item_capacity: int = DEFAULT_BASKET_ITEM_CAPACITY,
    num_trolleys: int | None = None,
    name: str = "instance",
) -> Instance:
    """Reduce the full graph to the orders' locations and size the fleet."""
    order_vertices = locate_orders(layout, orders)
    required = set()
    for verts in order_vertices.values():
        required.update(verts)
    graph = reduce_graph(build_full_graph(layout), required)
    total = sum(o.baskets(basket_item_capacity) for o in orders)
    if num_trolleys is None:
        num_trolleys = fleet_size(total, trolley_capacity)
    return Instance(
        graph=graph,
        orders=list(orders),
        order_vertices=order_vertices,
        trolley_capacity=trolley_capacity,
        num_trolleys=num_trolleys,
        basket_item_capacity=basket_item_capacity,
        name=name,
    )


# ---------------------------------------------------------------------------
# purchase-log combining


def combine_orders(log: Iterable[tuple], window_days: int) -> list:
    """Merge each customer's purchases from their first active days.

    ``log`` rows are ``(customer, date, lines)`` with ``date`` an ISO string
    or ``datetime.date`` and ``lines`` a list of ``(product_id, qty)``.  All
    purchases a customer makes within ``window_days`` days of their first
    purchase merge into one order (same-product quantities summed).  Orders
    are returned largest first: by distinct-product count descending, then
    items descending, then customer id.
    """
    if window_days < 1:
        raise InstanceError("window_days must be >= 1")
    rows = []
    for customer, when, lines in log:
        if isinstance(when, str):
            when = date.fromisoformat(when)
        rows.append((str(customer), when, lines))
    first_day: dict = {}
    for customer, when, _ in sorted(rows, key=lambda r: (r[0], r[1])):
        first_day.setdefault(customer, when)
    merged: dict = {}
    for customer, when, lines in rows:
        if when >= first_day[customer] + timedelta(days=window_days):
            continue
        bucket = merged.setdefault(customer, {})
        for pid, qty in lines:
            bucket[pid] = bucket.get(pid, 0) + int(qty)
    combined = [
        (customer, tuple(sorted(bucket.items())))
        for customer, bucket in merged.items()
    ]
    combined.sort(
        key=lambda cl: (-len(cl[1]), -sum(q for _, q in cl[1]), cl[0])
    )
    return [
        Order(id=i + 1, lines=lines, customer=customer)
        for i, (customer, lines) in enumerate(combined)
    ]


def synth_orders(
    seed: int,
    num_customers: int,
    products: Sequence[str],
    mean_products_per_purchase: float = 4.0,
    mean_qty: float = 2.0,
    purchases_per_customer: int = 3,
    start: date = date(2020, 1, 1),
    horizon_days: int = 60,
) -> list:
    """Deterministic synthetic purchase log shaped like a retail history.

    Distinct-product counts per purchase and per-line quantities follow
    geometric distributions with the requested means.
    """
    rng = random.Random(seed)
    p_products = 1.0 / mean_products_per_purchase
    p_qty = 1.0 / mean_qty
    log = []
    for ci in range(num_customers):
        customer = f"C{ci:05d}"
        for _ in range(purchases_per_customer):
            when = start + timedelta(days=rng.randrange(horizon_days))
            k = min(_geometric(rng, p_products), len(products))
            chosen = rng.sample(list(products), k)
            lines = [(pid, _geometric(rng, p_qty)) for pid in sorted(chosen)]
            log.append((customer, when, lines))
    log.sort(key=lambda r: (r[0], r[1]))
    return log


def _geometric(rng: random.Random, p: float) -> int:
    count = 1
    while rng.random() >= p:
        count += 1
    return count


# ---------------------------------------------------------------------------
# serialization


def instance_to_dict(inst: Instance) -> dict:
    return {
        "format": "jobprp-instance",
        "version": 1,
        "name": inst.name,
        "trolley_capacity": inst.trolley_capacity,
        "num_trolleys": inst.num_trolleys,
        "basket_item_capacity": inst.basket_item_capacity,
        "orders": [
            {
                "id": o.id,
                "customer": o.customer,
                "lines": [[pid, qty] for pid, qty in o.lines],
                "vertices": [list(v) for v in inst.order_vertices[o.id]],
            }
            for o in inst.orders
        ],
        "graph": graph_to_dict(inst.graph),
        "header": {
            "total_baskets": inst.total_baskets,
            "num_vertices": len(inst.graph.vertices),
            "num_arcs": sum(len(n) for n in inst.graph.adj.values()),
        },
    }


def instance_from_dict(data: Mapping) -> Instance:
    if data.get("format") != "jobprp-instance":
        raise InstanceError("not a jobprp instance document")
    orders = [
        Order(
            id=int(od["id"]),
            lines=tuple((pid, int(q)) for pid, q in od["lines"]),
            customer=od.get("customer", ""),
        )
        for od in data["orders"]
    ]
    order_vertices = {
        int(od["id"]): tuple(tuple(v) for v in od["vertices"])
        for od in data["orders"]
    }
    inst = Instance(
        graph=graph_from_dict(data["graph"]),
        orders=orders,
        order_vertices=order_vertices,
        trolley_capacity=int(data["trolley_capacity"]),
        num_trolleys=int(data["num_trolleys"]),
        basket_item_capacity=int(data["basket_item_capacity"]),
        name=data.get("name", "instance"),
    )
    header = data.get("header", {})
    recomputed = {
        "total_baskets": inst.total_baskets,
        "num_vertices": len(inst.graph.vertices),
        "num_arcs": sum(len(n) for n in inst.graph.adj.values()),
    }
    for key, value in header.items():
        if recomputed.get(key) != value:
            raise InstanceError(
                f"header field {key}={value} disagrees with recomputed "
                f"{recomputed.get(key)}"
            )
    return inst


def save_instance(inst: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_instance(path: str) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def log_to_csv(log: Iterable[tuple]) -> str:
    """Purchase log as CSV text: customer, ISO date, product, qty."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["customer", "date", "product", "qty"])
    for customer, when, lines in log:
        iso = when if isinstance(when, str) else when.isoformat()
        for pid, qty in lines:
            writer.writerow([customer, iso, pid, qty])
    return buf.getvalue()


def log_from_csv(text: str) -> list:
    reader = csv.DictReader(io.StringIO(text))
    grouped: dict = {}
    for row in reader:
        key = (row["customer"], row["date"])
        grouped.setdefault(key, []).append((row["product"], int(row["qty"])))
    return [
        (customer, date.fromisoformat(iso), lines)
        for (customer, iso), lines in sorted(grouped.items())
    ]
