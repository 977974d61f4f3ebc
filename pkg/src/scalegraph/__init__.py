"""Parallel scale-free graph generation over simulated message-passing ranks."""

from .core import (
    ConfigError,
    DEFAULT_SEED,
    EdgeList,
    FormatError,
    Partition,
    empty_edge_list,
    read_edge_list,
    write_edge_list,
)
from .factions import FactionConfig
from .kronecker import (
    ErFlip,
    ExpandResult,
    GroupAssignment,
    PkParams,
    PkRun,
    ProcessorGroup,
    SeedGraph,
    SeedPerturb,
    apply_er_flip,
    apply_seed_perturbation,
    demo_seed,
    even_split,
    expand_meta_edges,
    generate_pk,
    kronecker_power,
    kronecker_product,
    load_seed_graph,
    partition_groups,
    run_pk,
    stack_depth_bound,
)
from .metrics import (
    DegreeHistogram,
    InsufficientDataError,
    MetricsError,
    PathStats,
    PowerLawFit,
    adjacency_raster,
    degree_distribution,
    degree_histogram,
    fit_power_law,
    path_stats,
    resolve_source_count,
    undirected_simple_edges,
    write_degree_csv,
    write_pgm,
)
from .preferential import (
    AssocList,
    EndpointPool,
    PbaParams,
    PbaRun,
    RankTrace,
    generate_pba,
    phase1_associate,
    phase2_serve,
    phase2_substitute,
    run_pba,
)
from .transport import (
    Message,
    ProtocolError,
    RankContext,
    RankError,
    TransportError,
    run_ranks,
)

__version__ = "0.1.0"

__all__ = [
    "AssocList",
    "ConfigError",
    "DEFAULT_SEED",
    "DegreeHistogram",
    "EdgeList",
    "EndpointPool",
    "ErFlip",
    "ExpandResult",
    "FactionConfig",
    "FormatError",
    "GroupAssignment",
    "InsufficientDataError",
    "Message",
    "MetricsError",
    "Partition",
    "PathStats",
    "PbaParams",
    "PbaRun",
    "PkParams",
    "PkRun",
    "PowerLawFit",
    "ProcessorGroup",
    "ProtocolError",
    "RankContext",
    "RankError",
    "RankTrace",
    "SeedGraph",
    "SeedPerturb",
    "TransportError",
    "adjacency_raster",
    "apply_er_flip",
    "apply_seed_perturbation",
    "degree_distribution",
    "degree_histogram",
    "demo_seed",
    "empty_edge_list",
    "even_split",
    "expand_meta_edges",
    "fit_power_law",
    "generate_pba",
    "generate_pk",
    "kronecker_power",
    "kronecker_product",
    "load_seed_graph",
    "partition_groups",
    "path_stats",
    "phase1_associate",
    "phase2_serve",
    "phase2_substitute",
    "resolve_source_count",
    "read_edge_list",
    "run_pba",
    "run_pk",
    "run_ranks",
    "stack_depth_bound",
    "undirected_simple_edges",
    "write_degree_csv",
    "write_edge_list",
    "write_pgm",
]
