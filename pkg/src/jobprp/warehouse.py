"""Parametric rectangular warehouse layouts with product placement.

A warehouse has ``num_aisles`` vertical aisles crossed by ``num_cross_aisles``
horizontal cross-aisles (always at least one at the top and one at the
bottom).  Aisles carry racks on both sides; racks are stacked in
``num_shelves`` shelves, each holding ``slots_per_shelf`` slot columns.  The
layout generator sizes the shelves so the warehouse holds at least
``min_products`` distinct products with as few empty slots as possible, and
places a sorted product catalog into consecutive slots so that similar
products end up physically close.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

WEST = "W"
EAST = "E"

# internal length unit: 1 tick = 0.05 m, so that half cross-aisle and half
# slot widths stay integral and all distance arithmetic is exact.
TICKS_PER_METRE = 20


class LayoutError(ValueError):
    """Raised for invalid layout configurations or placement requests."""


def metres_to_ticks(value_m: float) -> int:
    ticks = value_m * TICKS_PER_METRE
    rounded = round(ticks)
    if abs(ticks - rounded) > 1e-6:
        raise LayoutError(
            f"length {value_m} m is not a multiple of 0.05 m; "
            "exact arithmetic requires tenth-metre (or half-tenth) units"
        )
    return int(rounded)


def ticks_to_metres(ticks: int) -> float:
    return ticks / TICKS_PER_METRE


@dataclass(frozen=True)
class LayoutConfig:
    """Geometric and capacity parameters of a warehouse layout.

    All lengths are in metres.  ``origin_offset`` is the distance from the
    picker origin to the nearest corner of the top cross-aisle.
    """

    num_aisles: int
    num_cross_aisles: int
    num_shelves: int
    min_products: int
    aisle_width: float = 3.0
    cross_aisle_width: float = 3.0
    rack_depth: float = 1.0
    slot_width: float = 1.0
    origin_offset: float = 4.0

    def __post_init__(self) -> None:
        if self.num_aisles < 1:
            raise LayoutError("num_aisles must be >= 1")
        if self.num_cross_aisles < 2:
            raise LayoutError(
                "num_cross_aisles must be >= 2 (top and bottom cross-aisles)"
            )
        if self.num_shelves < 1:
            raise LayoutError("num_shelves must be >= 1")
        if self.min_products < 1:
            raise LayoutError("min_products must be >= 1")
        for name in ("aisle_width", "cross_aisle_width", "rack_depth", "slot_width"):
            if getattr(self, name) <= 0:
                raise LayoutError(f"{name} must be > 0")
        if self.origin_offset < 0:
            raise LayoutError("origin_offset must be >= 0")
        # fail early if the geometry cannot be represented exactly
        for name in (
            "aisle_width",
            "cross_aisle_width",
            "rack_depth",
            "slot_width",
            "origin_offset",
        ):
            metres_to_ticks(getattr(self, name))

    def to_dict(self) -> dict:
        return {
            "num_aisles": self.num_aisles,
            "num_cross_aisles": self.num_cross_aisles,
            "num_shelves": self.num_shelves,
            "min_products": self.min_products,
            "aisle_width": self.aisle_width,
            "cross_aisle_width": self.cross_aisle_width,
            "rack_depth": self.rack_depth,
            "slot_width": self.slot_width,
            "origin_offset": self.origin_offset,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "LayoutConfig":
        return cls(**dict(data))


@dataclass(frozen=True)
class SlotCoord:
    """Position of a single product slot: aisle, rack side, shelf, column."""

    aisle: int  # 1..num_aisles
    side: str  # WEST or EAST
    shelf: int  # 1..num_shelves
    column: int  # 1..slots_per_shelf, counted north to south

    def as_list(self) -> list:
        return [self.aisle, self.side, self.shelf, self.column]


def _block_columns(slots_per_shelf: int, num_blocks: int) -> tuple[int, ...]:
    """Split the slot columns of an aisle into blocks as equally as possible.

    Blocks nearer the top receive the extra column when the split is uneven.
    """
    base, extra = divmod(slots_per_shelf, num_blocks)
    return tuple(base + 1 if b < extra else base for b in range(num_blocks))


@dataclass(frozen=True)
class WarehouseLayout:
    config: LayoutConfig
    slots_per_shelf: int
    subaisle_slot_counts: tuple[tuple[int, ...], ...]  # per aisle, per block
    placement: dict = field(default_factory=dict)  # product id -> SlotCoord

    @property
    def capacity(self) -> int:
        c = self.config
        return 2 * c.num_aisles * c.num_shelves * self.slots_per_shelf

    @property
    def empty_slots(self) -> int:
        return self.capacity - len(self.placement)

    def block_of_column(self, column: int) -> tuple[int, int]:
        """Map a slot column (1-based) to its (block, position-in-block)."""
        counts = self.subaisle_slot_counts[0]
        remaining = column
        for block, count in enumerate(counts, start=1):
            if remaining <= count:
                return block, remaining
            remaining -= count
        raise LayoutError(f"column {column} out of range")

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "slots_per_shelf": self.slots_per_shelf,
            "subaisle_slot_counts": [list(row) for row in self.subaisle_slot_counts],
            "placement": {
                str(pid): coord.as_list() for pid, coord in self.placement.items()
            },
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "WarehouseLayout":
        placement = {
            pid: SlotCoord(a, side, shelf, col)
            for pid, (a, side, shelf, col) in data["placement"].items()
        }
        return cls(
            config=LayoutConfig.from_dict(data["config"]),
            slots_per_shelf=int(data["slots_per_shelf"]),
            subaisle_slot_counts=tuple(
                tuple(row) for row in data["subaisle_slot_counts"]
            ),
            placement=placement,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "WarehouseLayout":
        return cls.from_dict(json.loads(text))


def required_slots_per_shelf(config: LayoutConfig) -> int:
    """Smallest per-shelf column count that fits ``min_products`` slots."""
    per_column = 2 * config.num_aisles * config.num_shelves
    return math.ceil(config.min_products / per_column)


def build_layout(
    config: LayoutConfig, catalog: Sequence[tuple[str, Sequence]]
) -> WarehouseLayout:
    """Generate a layout and place a product catalog into its slots.

    ``catalog`` is a sequence of ``(product_id, category_key)`` pairs where
    ``category_key`` is the 4-level category hierarchy of the product.
    Products are sorted by category (highest level first, product id as the
    final tiebreak) and written into consecutive slots: aisle by aisle west
    to east, west rack side before east, top shelf to bottom shelf, north
    column to south column.
    """
    if not catalog:
        raise LayoutError("catalog must not be empty")
    n_slot = required_slots_per_shelf(config)
    capacity = 2 * config.num_aisles * config.num_shelves * n_slot
    if len(catalog) > capacity:
        raise LayoutError(
            f"catalog of {len(catalog)} products exceeds generated capacity {capacity}"
        )
    seen: set = set()
    for pid, _ in catalog:
        if pid in seen:
            raise LayoutError(f"duplicate product id {pid!r} in catalog")
        seen.add(pid)

    ordered = sorted(catalog, key=lambda item: (tuple(item[1]), item[0]))
    slots = _slot_fill_order(config, n_slot)
    placement = {pid: coord for (pid, _), coord in zip(ordered, slots)}

    counts = _block_columns(n_slot, config.num_cross_aisles - 1)
    return WarehouseLayout(
        config=config,
        slots_per_shelf=n_slot,
        subaisle_slot_counts=tuple(counts for _ in range(config.num_aisles)),
        placement=placement,
    )


def _slot_fill_order(config: LayoutConfig, n_slot: int) -> Iterable[SlotCoord]:
    for aisle in range(1, config.num_aisles + 1):
        for side in (WEST, EAST):
            for shelf in range(1, config.num_shelves + 1):
                for column in range(1, n_slot + 1):
                    yield SlotCoord(aisle, side, shelf, column)


def subaisle_count(layout: WarehouseLayout) -> int:
    """Number of subaisles: aisles times blocks."""
    c = layout.config
    return c.num_aisles * (c.num_cross_aisles - 1)


def make_catalog(num_products: int, levels: tuple[int, int, int, int] = (4, 4, 4, 4)):
    """Synthetic product catalog with a 4-level category hierarchy.

    Category levels are derived from the product index by mixed-radix
    decomposition, giving a deterministic hierarchy of the requested shape.
    """
    catalog = []
    for i in range(num_products):
        rem = i
        key = []
        for width in levels:
            key.append(rem % width)
            rem //= width
        catalog.append((f"P{i:05d}", tuple(reversed(key))))
    return catalog
