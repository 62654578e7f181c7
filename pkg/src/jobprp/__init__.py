"""Exact and heuristic solvers for joint order batching and picker routing
in multi-block warehouses."""

from .engine import (
    BackendContract,
    SolveConfig,
    SolveError,
    Solution,
    benchmark_row,
    solve_jobprp,
    solve_routing,
)
from .graph import (
    ORIGIN,
    PickingGraph,
    build_full_graph,
    column,
    expand_walk,
    intersection,
    metric_closure,
    reduce_graph,
    shortest_path,
    walk_length,
)
from .heuristics import (
    HeuristicSolution,
    estimate_route,
    rolling_k,
    run_variant,
    savings_batch,
)
from .instance import (
    Instance,
    InstanceError,
    Order,
    build_instance,
    combine_orders,
    compute_baskets,
    fleet_size,
    load_instance,
    save_instance,
    synth_orders,
)
from .model import ALL_FAMILIES, ModelSpec, build_model, collapse_subaisles
from .oracle import OracleLimits, OracleSolution, oracle_route, oracle_solve
from .warehouse import (
    LayoutConfig,
    LayoutError,
    WarehouseLayout,
    build_layout,
    make_catalog,
)

__version__ = "1.0.0"

__all__ = [
    "ALL_FAMILIES",
    "BackendContract",
    "HeuristicSolution",
    "Instance",
    "InstanceError",
    "LayoutConfig",
    "LayoutError",
    "ModelSpec",
    "ORIGIN",
    "Order",
    "OracleLimits",
    "OracleSolution",
    "PickingGraph",
    "SolveConfig",
    "SolveError",
    "Solution",
    "WarehouseLayout",
    "benchmark_row",
    "build_full_graph",
    "build_instance",
    "build_layout",
    "build_model",
    "collapse_subaisles",
    "column",
    "combine_orders",
    "compute_baskets",
    "estimate_route",
    "expand_walk",
    "fleet_size",
    "intersection",
    "load_instance",
    "make_catalog",
    "metric_closure",
    "oracle_route",
    "oracle_solve",
    "reduce_graph",
    "rolling_k",
    "run_variant",
    "save_instance",
    "savings_batch",
    "shortest_path",
    "solve_jobprp",
    "solve_routing",
    "synth_orders",
    "walk_length",
]
