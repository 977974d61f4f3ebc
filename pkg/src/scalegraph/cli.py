"""Command-line front end: generate graphs, measure them, render rasters.

Commands print machine-readable key=value lines on stdout. Exit codes:
0 on success, 2 for unusable arguments (the message names the flag),
1 for runtime failures such as unreadable files or invalid configs.
"""

from __future__ import annotations

import argparse
import sys
import time
from contextlib import ExitStack

from .core import (
    ConfigError,
    DEFAULT_SEED,
    FormatError,
    read_edge_list,
    write_edge_list,
)
from .factions import FactionConfig
from .kronecker import (
    ErFlip,
    PkParams,
    SeedPerturb,
    demo_seed,
    load_seed_graph,
    run_pk,
)
from .metrics import (
    InsufficientDataError,
    MetricsError,
    adjacency_raster,
    degree_distribution,
    degree_histogram,
    fit_power_law,
    path_stats,
    undirected_simple_edges,
    write_degree_csv,
    write_pgm,
)
from .preferential import PbaParams, run_pba
from .transport import TransportError


class UsageError(Exception):
    """Bad flag value detected after argparse; maps to exit code 2."""


def _fmt(value: float) -> str:
    return str(round(value, 4))


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {value}")
    return value


def _parse_factions(spec: str, nranks: int) -> FactionConfig:
    if spec.startswith("file:"):
        try:
            return FactionConfig.from_file(spec[len("file:"):], nranks)
        except (OSError, FormatError, ConfigError) as exc:
            raise UsageError(f"--factions: {exc}") from exc
    try:
        return FactionConfig.from_spec(spec, nranks)
    except ConfigError as exc:
        raise UsageError(f"--factions: {exc}") from exc


def _parse_noise(spec: str | None):
    if spec is None:
        return None
    kind, _, arg = spec.partition(":")
    try:
        if kind == "perturb":
            return SeedPerturb(float(arg))
        if kind == "flip":
            return ErFlip(int(arg))
    except (ValueError, ConfigError) as exc:
        raise UsageError(f"--noise: {exc}") from exc
    raise UsageError(
        f"--noise: unknown mode {spec!r}, expected 'perturb:<p>' or 'flip:<n>'"
    )


def _parse_sources(spec: str):
    if spec in ("auto", "all"):
        return spec
    try:
        count = int(spec)
    except ValueError as exc:
        raise UsageError(
            f"--sources: expected 'auto', 'all' or a count, got {spec!r}"
        ) from exc
    if count < 1:
        raise UsageError(f"--sources: count must be >= 1, got {count}")
    return count


def _cmd_generate_pba(args: argparse.Namespace) -> int:
    factions = _parse_factions(args.factions, args.ranks)
    params = PbaParams(
        vertices_per_rank=args.vertices_per_rank,
        edges_per_vertex=args.edges_per_vertex,
        inter_faction_prob=args.inter_faction_prob,
        master_seed=args.seed,
    )
    with ExitStack() as stack:
        debug = (
            stack.enter_context(open(args.debug_comms, "w", encoding="ascii"))
            if args.debug_comms
            else None
        )
        start = time.perf_counter()
        run = run_pba(params, factions, workers=args.workers, debug=debug)
        wall = time.perf_counter() - start
    write_edge_list(run.edges, args.output, fmt=args.format)
    print("generator=pba")
    print(f"ranks={factions.nranks}")
    print(f"vertices={run.edges.vertex_count}")
    print(f"edges={run.edges.edge_count}")
    print(f"rank_edges={','.join(str(c) for c in run.per_rank_edges)}")
    print(f"wall_time_s={_fmt(wall)}")
    print(f"output={args.output}")
    return 0


def _cmd_generate_pk(args: argparse.Namespace) -> int:
    seed_graph = demo_seed() if args.seed_graph is None else load_seed_graph(args.seed_graph)
    params = PkParams(
        iterations=args.iterations,
        noise=_parse_noise(args.noise),
        master_seed=args.seed,
    )
    with ExitStack() as stack:
        debug = (
            stack.enter_context(open(args.debug_comms, "w", encoding="ascii"))
            if args.debug_comms
            else None
        )
        start = time.perf_counter()
        run = run_pk(args.ranks, seed_graph, params, workers=args.workers, debug=debug)
        wall = time.perf_counter() - start
    write_edge_list(run.edges, args.output, fmt=args.format)
    print("generator=pk")
    print(f"ranks={args.ranks}")
    print(f"iterations={args.iterations}")
    print(f"vertices={run.edges.vertex_count}")
    print(f"edges={run.edges.edge_count}")
    print(f"rank_edges={','.join(str(c) for c in run.per_rank_edges)}")
    print(f"max_stack_depth={run.max_stack_depth}")
    print(f"wall_time_s={_fmt(wall)}")
    print(f"output={args.output}")
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    sources = _parse_sources(args.sources)
    graph = read_edge_list(args.graph)
    degrees = degree_distribution(graph)
    simple = undirected_simple_edges(graph)
    print(f"vertices={graph.vertex_count}")
    print(f"edges={simple.shape[0]}")
    print(f"max_degree={int(degrees.max()) if degrees.size else 0}")
    try:
        fit = fit_power_law(degrees, min_degree=args.fit_min_degree)
        print(f"gamma={_fmt(fit.gamma)}")
        print(f"fit_bins={fit.bins_used}")
        print(f"fit_r2={_fmt(fit.r_squared)}")
    except InsufficientDataError as exc:
        print(f"degree tail not fitted: {exc}", file=sys.stderr)
    stats = path_stats(graph, sources=sources, seed=args.seed)
    print(f"sources={stats.source_count}")
    print(f"avg_path_length={_fmt(stats.avg_path_length)}")
    print(f"diameter={stats.diameter}")
    if args.degree_csv:
        write_degree_csv(degree_histogram(graph), args.degree_csv)
        print(f"degree_csv={args.degree_csv}")
    return 0


def _cmd_raster(args: argparse.Namespace) -> int:
    graph = read_edge_list(args.graph)
    image = adjacency_raster(graph, size=args.size)
    write_pgm(image, args.output, binary=not args.ascii)
    print(f"raster={args.output}")
    print(f"size={args.size}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scalegraph",
        description="Parallel scale-free graph generators and metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help="master RNG seed (default %(default)s)")
        p.add_argument("--workers", type=_positive_int, default=1,
                       help="threads driving the simulated ranks")
        p.add_argument("--format", choices=("text", "binary"), default="text",
                       help="edge list output format")
        p.add_argument("--debug-comms", metavar="PATH",
                       help="write per-phase message volumes as CSV")
        p.add_argument("-o", "--output", required=True, metavar="PATH",
                       help="edge list destination")

    pba = sub.add_parser("generate-pba",
                         help="two-phase preferential attachment")
    pba.add_argument("--ranks", type=_positive_int, required=True)
    pba.add_argument("--vertices-per-rank", type=_positive_int, required=True)
    pba.add_argument("--edges-per-vertex", type=_positive_int, required=True)
    pba.add_argument("--inter-faction-prob", type=_probability, default=0.0)
    pba.add_argument("--factions", default="all",
                     help="'all', 'blocks:<m>' or 'file:<path>'")
    add_common(pba)
    pba.set_defaults(func=_cmd_generate_pba)

    pk = sub.add_parser("generate-pk", help="stack-driven Kronecker expansion")
    pk.add_argument("--ranks", type=_positive_int, required=True)
    pk.add_argument("--iterations", type=_nonneg_int, required=True)
    pk.add_argument("--seed-graph", metavar="PATH",
                    help="seed matrix file (default: built-in 5-vertex hub)")
    pk.add_argument("--noise", metavar="SPEC",
                    help="'perturb:<p>' or 'flip:<n>'")
    add_common(pk)
    pk.set_defaults(func=_cmd_generate_pk)

    met = sub.add_parser("metrics", help="degree and path statistics")
    met.add_argument("graph", help="edge list to measure")
    met.add_argument("--sources", default="auto",
                     help="'auto', 'all' or a source count for path sampling")
    met.add_argument("--fit-min-degree", type=_positive_int, default=1,
                     help="smallest degree used by the tail fit")
    met.add_argument("--degree-csv", metavar="PATH",
                     help="also write the degree histogram as CSV")
    met.add_argument("--seed", type=int, default=DEFAULT_SEED)
    met.set_defaults(func=_cmd_metrics)

    ras = sub.add_parser("raster", help="adjacency heat map as PGM")
    ras.add_argument("graph", help="edge list to render")
    ras.add_argument("-o", "--output", required=True, metavar="PATH")
    ras.add_argument("--size", type=_positive_int, default=512)
    ras.add_argument("--ascii", action="store_true",
                     help="write ascii P2 instead of binary P5")
    ras.set_defaults(func=_cmd_raster)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, FormatError, TransportError, MetricsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
