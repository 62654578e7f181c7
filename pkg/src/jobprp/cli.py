"""Command-line interface.

Subcommands: ``generate`` (synthetic instance from a layout and purchase
profile), ``import`` (instance from a purchase-log CSV), ``solve`` (exact
branch-and-cut), ``route`` (single-walk routing), ``batch`` (savings
heuristics), ``tradeoff`` (arrival-wave sweep over K), ``ablate`` (row-family
sweep), ``render`` (deterministic SVG figure) and ``validate`` (file checks).

Every command that writes outputs also writes ``<out>.manifest.json``
recording the command, its flags, input hashes, output paths, the seed and
package versions, so any run can be reproduced from its manifest.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import platform
import sys
from dataclasses import asdict, dataclass, field

from . import __version__
from .engine import (
    BENCHMARK_COLUMNS,
    BackendContract,
    SolveConfig,
    Solution,
    benchmark_row,
    solve_jobprp,
    solve_routing,
)
from .graph import ORIGIN
from .heuristics import estimate_route, rolling_k, run_variant
from .instance import (
    Instance,
    build_instance,
    combine_orders,
    instance_from_dict,
    load_instance,
    log_from_csv,
    save_instance,
    synth_orders,
)
from .model import ALL_FAMILIES
from .warehouse import LayoutConfig, build_layout, make_catalog, ticks_to_metres


class CliError(SystemExit):
    def __init__(self, message: str) -> None:
        print(f"error: {message}", file=sys.stderr)
        super().__init__(2)


# ---------------------------------------------------------------------------
# run manifests


@dataclass
class RunManifest:
    command: str
    config: dict
    input_hashes: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    seed: int | None = None
    versions: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.versions:
            import numpy
            import scipy

            self.versions = {
                "jobprp": __version__,
                "python": platform.python_version(),
                "numpy": numpy.__version__,
                "scipy": scipy.__version__,
            }

    def add_input(self, path: str) -> None:
        with open(path, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        self.input_hashes[path] = digest

    def write(self) -> None:
        if not self.outputs:
            return
        missing = [p for p in self.outputs if not os.path.exists(p)]
        if missing:
            raise CliError(f"declared outputs missing: {missing}")
        path = self.outputs[0] + ".manifest.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, sort_keys=True, indent=2)
            fh.write("\n")


def _snapshot(args) -> dict:
    """JSON-safe snapshot of the parsed flags."""
    return {k: v for k, v in vars(args).items() if k != "func"}


def _select_backend() -> BackendContract:
    name = os.environ.get("JOBPRP_BACKEND", "scipy-highs")
    if name != "scipy-highs":
        raise CliError(f"unknown backend {name!r}; available: scipy-highs")
    return BackendContract()


# ---------------------------------------------------------------------------
# shared flag handling


def _add_layout_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--aisles", type=int, default=8)
    p.add_argument("--cross-aisles", type=int, default=3)
    p.add_argument("--shelves", type=int, default=3)
    p.add_argument("--min-products", type=int, default=1560)
    p.add_argument("--trolley-capacity", type=int, default=8)
    p.add_argument("--aisle-width", type=float, default=3.0)
    p.add_argument("--cross-aisle-width", type=float, default=3.0)
    p.add_argument("--origin-offset", type=float, default=4.0)


def _layout_from_args(args) -> LayoutConfig:
    return LayoutConfig(
        num_aisles=args.aisles,
        num_cross_aisles=args.cross_aisles,
        num_shelves=args.shelves,
        min_products=args.min_products,
        aisle_width=args.aisle_width,
        cross_aisle_width=args.cross_aisle_width,
        origin_offset=args.origin_offset,
    )


def _add_solve_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("ibc", "fbc"), default="ibc")
    p.add_argument(
        "--families",
        default="all",
        help="comma-separated row families, or 'all'/'none'",
    )
    p.add_argument("--no-reversal", action="store_true")
    p.add_argument("--time-limit", type=float, default=None)


def _parse_families(text: str) -> tuple:
    if text == "all":
        return ALL_FAMILIES
    if text == "none":
        return ()
    names = tuple(n.strip() for n in text.split(",") if n.strip())
    unknown = [n for n in names if n not in ALL_FAMILIES]
    if unknown:
        raise CliError(
            f"unknown families {unknown}; available: {', '.join(ALL_FAMILIES)}"
        )
    return names


def _solve_config(args) -> SolveConfig:
    _select_backend()
    return SolveConfig(
        mode=args.mode,
        families=_parse_families(args.families),
        no_reversal=args.no_reversal,
        time_limit=args.time_limit,
    )


def _print_summary(inst: Instance) -> None:
    s = inst.summary()
    print(
        f"instance {inst.name}: O={s['orders']} baskets={s['total_baskets']} "
        f"T={s['num_trolleys']} |V|={s['num_vertices']} |A|={s['num_arcs']}"
    )


def _append_csv(path: str, rows: list) -> None:
    exists = os.path.exists(path)
    with open(path, "a", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCHMARK_COLUMNS)
        if not exists:
            writer.writeheader()
        writer.writerows(rows)


def _write_solution(sol: Solution, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(sol.to_json())
        fh.write("\n")


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args) -> int:
    config = _layout_from_args(args)
    layout = build_layout(config, make_catalog(args.min_products))
    products = sorted(layout.placement)
    log = synth_orders(
        seed=args.seed,
        num_customers=args.orders,
        products=products,
        mean_products_per_purchase=args.mean_products,
        mean_qty=args.mean_qty,
    )
    orders = combine_orders(log, args.window)[: args.orders]
    if len(orders) < args.orders:
        raise CliError(
            f"profile produced only {len(orders)} orders, wanted {args.orders}"
        )
    inst = build_instance(
        layout,
        orders,
        trolley_capacity=args.trolley_capacity,
        name=args.name or f"synthetic-d{args.window}-o{args.orders}-s{args.seed}",
    )
    save_instance(inst, args.out)
    _print_summary(inst)
    manifest = RunManifest(
        command="generate",
        config=_snapshot(args),
        outputs=[args.out],
        seed=args.seed,
    )
    manifest.write()
    return 0


def cmd_import(args) -> int:
    config = _layout_from_args(args)
    layout = build_layout(config, make_catalog(args.min_products))
    with open(args.log, encoding="utf-8") as fh:
        log = log_from_csv(fh.read())
    orders = combine_orders(log, args.window)
    if args.orders is not None:
        orders = orders[: args.orders]
    inst = build_instance(
        layout,
        orders,
        trolley_capacity=args.trolley_capacity,
        name=args.name or os.path.splitext(os.path.basename(args.log))[0],
    )
    save_instance(inst, args.out)
    _print_summary(inst)
    manifest = RunManifest(
        command="import", config=_snapshot(args), outputs=[args.out]
    )
    manifest.add_input(args.log)
    manifest.write()
    return 0


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    sol = solve_jobprp(inst, _solve_config(args))
    row = benchmark_row(inst.name, sol)
    print(" ".join(f"{k}={row[k]}" for k in BENCHMARK_COLUMNS))
    outputs = []
    if args.out:
        _write_solution(sol, args.out)
        outputs.append(args.out)
    if args.csv:
        _append_csv(args.csv, [row])
        outputs.append(args.csv)
    manifest = RunManifest(command="solve", config=_snapshot(args), outputs=outputs)
    manifest.add_input(args.instance)
    manifest.write()
    return 0


def cmd_route(args) -> int:
    inst = load_instance(args.instance)
    if args.order:
        missing = [oid for oid in args.order if oid not in inst.order_vertices]
        if missing:
            raise CliError(f"unknown order ids {missing}")
        required = set()
        for oid in args.order:
            required.update(inst.order_vertices[oid])
    else:
        required = set(inst.required_vertices)
    _select_backend()
    if args.estimate:
        walk, length = estimate_route(inst.graph, required)
    else:
        walk, length = solve_routing(
            inst.graph,
            required,
            time_limit=args.time_limit,
            families=_parse_families(args.families),
            mode=args.mode,
        )
    print(f"route length: {ticks_to_metres(length):.1f} m over {len(walk)} stops")
    outputs = []
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "walk": [list(v) for v in walk],
                    "length_m": ticks_to_metres(length),
                    "length_ticks": length,
                },
                fh,
                sort_keys=True,
                indent=2,
            )
            fh.write("\n")
        outputs.append(args.out)
    manifest = RunManifest(command="route", config=_snapshot(args), outputs=outputs)
    manifest.add_input(args.instance)
    manifest.write()
    return 0


def cmd_batch(args) -> int:
    inst = load_instance(args.instance)
    _select_backend()
    sol = run_variant(inst, args.variant, time_limit=args.time_limit)
    print(f"{sol.method}: total {sol.value:.1f} m across {len(sol.walks)} trolleys")
    for t in sorted(sol.assignments):
        print(f"  trolley {t}: orders {sol.assignments[t]}")
    outputs = []
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(
                {
                    "method": sol.method,
                    "value_m": sol.value,
                    "value_ticks": sol.value_ticks,
                    "assignments": {
                        str(t): list(o) for t, o in sol.assignments.items()
                    },
                    "walks": {
                        str(t): [list(v) for v in w] for t, w in sol.walks.items()
                    },
                },
                fh,
                sort_keys=True,
                indent=2,
            )
            fh.write("\n")
        outputs.append(args.out)
    manifest = RunManifest(command="batch", config=_snapshot(args), outputs=outputs)
    manifest.add_input(args.instance)
    manifest.write()
    return 0


def cmd_tradeoff(args) -> int:
    inst = load_instance(args.instance)
    _select_backend()
    ks = sorted({int(k) for k in args.k.split(",")})
    rows = []
    for k in ks:
        total, trace = rolling_k(
            inst, k, solve_config=SolveConfig(time_limit=args.time_limit)
        )
        print(f"K={k}: total {ticks_to_metres(total):.1f} m in {len(trace)} waves")
        rows.append(
            {
                "instance": inst.name,
                "K": k,
                "total_m": f"{ticks_to_metres(total):.1f}",
                "waves": len(trace),
            }
        )
    outputs = []
    if args.csv:
        exists = os.path.exists(args.csv)
        with open(args.csv, "a", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(
                fh, fieldnames=["instance", "K", "total_m", "waves"]
            )
            if not exists:
                writer.writeheader()
            writer.writerows(rows)
        outputs.append(args.csv)
    manifest = RunManifest(
        command="tradeoff", config=_snapshot(args), outputs=outputs
    )
    manifest.add_input(args.instance)
    manifest.write()
    return 0


def cmd_ablate(args) -> int:
    inst = load_instance(args.instance)
    _select_backend()
    subsets = [("all", ALL_FAMILIES), ("none", ())]
    subsets += [
        (f"minus-{fam}", tuple(f for f in ALL_FAMILIES if f != fam))
        for fam in ALL_FAMILIES
    ]
    rows = []
    for label, families in subsets:
        sol = solve_jobprp(
            inst,
            SolveConfig(
                mode=args.mode, families=families, time_limit=args.time_limit
            ),
        )
        row = benchmark_row(f"{inst.name}/{label}", sol)
        print(" ".join(f"{k}={row[k]}" for k in BENCHMARK_COLUMNS))
        rows.append(row)
    outputs = []
    if args.csv:
        _append_csv(args.csv, rows)
        outputs.append(args.csv)
    manifest = RunManifest(command="ablate", config=_snapshot(args), outputs=outputs)
    manifest.add_input(args.instance)
    manifest.write()
    return 0


def cmd_validate(args) -> int:
    with open(args.instance, encoding="utf-8") as fh:
        data = json.load(fh)
    if args.schema:
        import jsonschema

        with open(args.schema, encoding="utf-8") as fh:
            jsonschema.validate(data, json.load(fh))
    inst = instance_from_dict(data)
    inst.graph.check()
    _print_summary(inst)
    print("ok")
    return 0


# ---------------------------------------------------------------------------
# rendering

_WALK_COLOURS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def render_svg(inst: Instance, walks: dict | None = None) -> str:
    """Deterministic SVG of the picking graph with optional trolley walks."""
    g = inst.graph
    xs = [x for x, _ in g.coords.values()]
    ys = [y for _, y in g.coords.values()]
    pad = 2.0
    scale = 12.0
    x0, y0 = min(xs) - pad, min(ys) - pad
    width = (max(xs) - min(xs) + 2 * pad) * scale
    height = (max(ys) - min(ys) + 2 * pad) * scale

    def pt(v) -> tuple:
        x, y = g.coords[v]
        return ((x - x0) * scale, (y - y0) * scale)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
    ]
    for u, v in sorted(g.arcs, key=repr):
        if repr(u) < repr(v):
            (ux, uy), (vx, vy) = pt(u), pt(v)
            parts.append(
                f'<line x1="{ux:.1f}" y1="{uy:.1f}" x2="{vx:.1f}" y2="{vy:.1f}" '
                f'stroke="#cccccc" stroke-width="1.5"/>'
            )
    if walks:
        for i, t in enumerate(sorted(walks)):
            colour = _WALK_COLOURS[i % len(_WALK_COLOURS)]
            points = " ".join(
                f"{x:.1f},{y:.1f}" for x, y in (pt(v) for v in walks[t])
            )
            parts.append(
                f'<polyline points="{points}" fill="none" stroke="{colour}" '
                f'stroke-width="2" stroke-opacity="0.8"/>'
            )
    required = set(inst.required_vertices)
    for v in g.vertices:
        x, y = pt(v)
        if v == ORIGIN:
            parts.append(
                f'<rect x="{x - 5:.1f}" y="{y - 5:.1f}" width="10" height="10" '
                f'fill="black"/>'
            )
        elif v in required:
            parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="4" fill="#d62728"/>')
        else:
            parts.append(
                f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3" fill="none" '
                f'stroke="black" stroke-width="1"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_render(args) -> int:
    inst = load_instance(args.instance)
    walks = None
    if args.solution:
        with open(args.solution, encoding="utf-8") as fh:
            data = json.load(fh)
        walks = {
            int(t): [tuple(v) for v in walk]
            for t, walk in data.get("walks", {}).items()
        }
    svg = render_svg(inst, walks)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    manifest = RunManifest(command="render", config=_snapshot(args), outputs=[args.out])
    manifest.add_input(args.instance)
    if args.solution:
        manifest.add_input(args.solution)
    manifest.write()
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jobprp",
        description="Order batching and picker routing toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic instance")
    _add_layout_flags(p)
    p.add_argument("--orders", type=int, required=True)
    p.add_argument("--window", type=int, default=5, help="combine window in days")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mean-products", type=float, default=4.0)
    p.add_argument("--mean-qty", type=float, default=2.0)
    p.add_argument("--name", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("import", help="build an instance from a purchase-log CSV")
    _add_layout_flags(p)
    p.add_argument("--log", required=True)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--orders", type=int, default=None)
    p.add_argument("--name", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("solve", help="exact branch-and-cut solve")
    p.add_argument("--instance", required=True)
    _add_solve_flags(p)
    p.add_argument("--out", default=None, help="solution JSON path")
    p.add_argument("--csv", default=None, help="benchmark CSV to append to")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("route", help="route one trolley through chosen orders")
    p.add_argument("--instance", required=True)
    p.add_argument("--order", type=int, action="append", default=None)
    p.add_argument("--estimate", action="store_true", help="heuristic portfolio")
    _add_solve_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("batch", help="savings batching heuristics")
    p.add_argument("--instance", required=True)
    p.add_argument("--variant", choices=("i", "ii", "iii"), default="ii")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("tradeoff", help="arrival-wave sweep over K")
    p.add_argument("--instance", required=True)
    p.add_argument("--k", required=True, help="comma-separated wave sizes")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("ablate", help="solve under row-family subsets")
    p.add_argument("--instance", required=True)
    p.add_argument("--mode", choices=("ibc", "fbc"), default="ibc")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("render", help="render instance (and solution) to SVG")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("validate", help="check an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--schema", default=None)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from .engine import SolveError
    from .heuristics import HeuristicError
    from .instance import InstanceError
    from .warehouse import LayoutError

    try:
        return args.func(args)
    except (InstanceError, SolveError, HeuristicError, LayoutError, OSError) as exc:
        raise CliError(str(exc))


if __name__ == "__main__":
    sys.exit(main())
