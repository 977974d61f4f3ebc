"""Stack-driven Kronecker expansion with communication-free rank partitioning.

A boolean seed matrix is expanded T times; the final adjacency is the
(T + 1)-fold Kronecker power of the seed, with n0^(T+1) vertices and,
without noise, e0^(T+1) edges. Instead of materialising intermediate
matrices, each seed edge is treated as a meta-edge that is repeatedly
replaced by one scaled copy of the seed's edges, depth first on an
explicit stack whose size stays within 1 + (e0 - 1) * (T + 1).

Ranks share the work without messages: starting from the full rank set
and the seed's edge list, any group larger than its current meta-edge
list splits into per-edge subgroups and descends one level; once a group
is no bigger than its list, each rank takes an even contiguous slice and
expands it locally. Every rank derives its slice from (rank, total ranks)
alone, so any rank count produces the same edge multiset.

Two noise modes: per-step seed perturbation flips each seed cell with a
fixed probability in a temporary copy keyed by the meta-edge being
replaced (so any schedule and rank count agree), and edge flipping
toggles sampled cells of the final edge set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .core import ConfigError, DEFAULT_SEED, EdgeList, FormatError
from .transport import RankContext, run_ranks

MetaEdge = tuple[int, int, int]  # (iteration, row, col)

_BLOCK_LEAF_CAP = 4096  # fast-path subtrees hold at most this many edges
_ER_FLIP_STREAM = 7  # RNG substream tag for edge flipping
_MAX_VERTICES = 2**62


@dataclass(frozen=True)
class SeedGraph:
    """Square boolean adjacency seed.

    Seeds that drive an expansion need at least one edge; transient
    copies produced by perturbation may be empty.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.matrix, dtype=bool)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ConfigError(f"seed matrix must be square, got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise ConfigError(f"seed must have at least 2 vertices, got {arr.shape[0]}")
        arr.flags.writeable = False
        object.__setattr__(self, "matrix", arr)

    @property
    def n0(self) -> int:
        return self.matrix.shape[0]

    @property
    def e0(self) -> int:
        return int(self.matrix.sum())

    @cached_property
    def _offsets(self) -> tuple[np.ndarray, np.ndarray]:
        rows, cols = np.nonzero(self.matrix)  # row-major
        return rows.astype(np.int64), cols.astype(np.int64)

    def nonzero_offsets(self) -> tuple[np.ndarray, np.ndarray]:
        """Row and column indices of seed edges, row-major."""
        return self._offsets

    @staticmethod
    def from_pairs(n0: int, pairs: Sequence[tuple[int, int]]) -> "SeedGraph":
        mat = np.zeros((n0, n0), dtype=bool)
        for r, c in pairs:
            if not (0 <= r < n0 and 0 <= c < n0):
                raise ConfigError(f"seed edge ({r}, {c}) outside [0, {n0})")
            if mat[r, c]:
                raise ConfigError(f"duplicate seed edge ({r}, {c})")
            mat[r, c] = True
        if not pairs:
            raise ConfigError("seed needs at least one edge")
        return SeedGraph(mat)


def demo_seed() -> SeedGraph:
    """5-vertex hub seed: self-loops everywhere plus hub row/column 0."""
    return SeedGraph.from_pairs(
        5,
        [(0, 0), (0, 1), (0, 2), (0, 3),
         (1, 0), (1, 1),
         (2, 0), (2, 2),
         (3, 0), (3, 3),
         (4, 4)],
    )


def load_seed_graph(path: str | Path) -> SeedGraph:
    """Read a seed file: first line n0, then one "r c" pair per line."""
    path = Path(path)
    n0: int | None = None
    pairs: list[tuple[int, int]] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if n0 is None:
                    if len(parts) != 1:
                        raise ValueError("expected a single vertex count")
                    n0 = int(parts[0])
                else:
                    if len(parts) != 2:
                        raise ValueError("expected 'row col'")
                    pairs.append((int(parts[0]), int(parts[1])))
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from exc
    if n0 is None:
        raise FormatError(f"{path}: empty seed file")
    try:
        return SeedGraph.from_pairs(n0, pairs)
    except ConfigError as exc:
        raise FormatError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class SeedPerturb:
    """Flip each seed cell with this probability, fresh per replacement."""

    probability: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.probability <= 1.0:
            raise ConfigError(
                f"perturbation probability must be in [0, 1], got {self.probability}"
            )


@dataclass(frozen=True)
class ErFlip:
    """Toggle this many uniformly sampled cells of the final edge set."""

    flips: int

    def __post_init__(self) -> None:
        if self.flips < 0:
            raise ConfigError(f"flip count must be >= 0, got {self.flips}")


Noise = SeedPerturb | ErFlip | None


@dataclass(frozen=True)
class PkParams:
    iterations: int
    noise: Noise = None
    master_seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise ConfigError(f"iterations must be >= 0, got {self.iterations}")
        if self.noise is not None and not isinstance(self.noise, (SeedPerturb, ErFlip)):
            raise ConfigError(f"unsupported noise {self.noise!r}")


@dataclass(frozen=True)
class ProcessorGroup:
    """Contiguous rank range [lo, hi) formed at a given iteration."""

    lo: int
    hi: int
    iteration: int = 0

    @property
    def size(self) -> int:
        return self.hi - self.lo


@dataclass(frozen=True)
class GroupAssignment:
    """Ranks [rank_lo, rank_hi) own meta-edges [edge_lo, edge_hi)."""

    rank_lo: int
    rank_hi: int
    edge_lo: int
    edge_hi: int


def even_split(total: int, parts: int) -> list[tuple[int, int]]:
    """Contiguous bounds of `parts` pieces whose sizes differ by at most 1.

    The remainder goes to the lowest-indexed pieces.
    """
    if parts < 1 or total < 0:
        raise ConfigError(f"cannot split {total} into {parts} parts")
    base, rem = divmod(total, parts)
    bounds = []
    lo = 0
    for j in range(parts):
        hi = lo + base + (1 if j < rem else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def partition_groups(
    group: ProcessorGroup, meta_edges: Sequence
) -> list[GroupAssignment]:
    """Assign a group's meta-edges without communication.

    A group larger than its edge list splits into one subgroup per edge;
    otherwise each rank takes an even contiguous slice of the list. Every
    rank can evaluate this from (group, list length) alone.
    """
    g = group.size
    m = len(meta_edges)
    if g < 1:
        raise ConfigError(f"empty processor group [{group.lo}, {group.hi})")
    if m < 1:
        raise ConfigError("meta-edge list is empty")
    if g > m:
        return [
            GroupAssignment(group.lo + rlo, group.lo + rhi, j, j + 1)
            for j, (rlo, rhi) in enumerate(even_split(g, m))
        ]
    return [
        GroupAssignment(group.lo + j, group.lo + j + 1, elo, ehi)
        for j, (elo, ehi) in enumerate(even_split(m, g))
    ]


def apply_seed_perturbation(
    seed: SeedGraph, probability: float, rng: np.random.Generator
) -> SeedGraph:
    """Temporary copy of the seed with each cell flipped independently."""
    if not 0.0 <= probability <= 1.0:
        raise ConfigError(f"perturbation probability must be in [0, 1], got {probability}")
    mask = rng.random(seed.matrix.shape) < probability
    return SeedGraph(seed.matrix ^ mask)


def _child_offsets(
    seed: SeedGraph,
    noise: SeedPerturb | None,
    noise_key: int,
    iteration: int,
    row: int,
    col: int,
) -> tuple[np.ndarray, np.ndarray]:
    # keyed by the meta-edge being replaced, so every rank and schedule
    # that replaces it draws the identical perturbed copy
    if noise is None:
        return seed.nonzero_offsets()
    rng = np.random.default_rng((noise_key, iteration, row, col))
    return apply_seed_perturbation(seed, noise.probability, rng).nonzero_offsets()


@dataclass(frozen=True)
class ExpandResult:
    edges: np.ndarray | None  # (m, 2) uint64, None when emitted to a consumer
    count: int
    max_stack_depth: int


def _leaf_tables(
    seed: SeedGraph, depth: int
) -> dict[int, tuple[np.ndarray, np.ndarray]]:
    # tables[d] lists a depth-d subtree's leaf offsets in the exact order
    # the literal stack emits them: children are pushed row-major, so they
    # are visited in reverse row-major at every level
    base_r, base_c = seed.nonzero_offsets()
    rev_r, rev_c = base_r[::-1], base_c[::-1]
    e0 = base_r.size
    n0 = seed.n0
    tables = {0: (np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64))}
    for d in range(1, depth + 1):
        pr, pc = tables[d - 1]
        scale = n0 ** (d - 1)
        tables[d] = (
            np.repeat(rev_r, pr.size) * scale + np.tile(pr, e0),
            np.repeat(rev_c, pc.size) * scale + np.tile(pc, e0),
        )
    return tables


def _auto_block_depth(e0: int, max_rem: int) -> int:
    if e0 <= 1:
        return max_rem
    depth = 0
    while e0 ** (depth + 1) <= _BLOCK_LEAF_CAP and depth < max_rem:
        depth += 1
    return depth


def expand_meta_edges(
    seed: SeedGraph,
    iterations: int,
    *,
    start: Sequence[tuple[int, int]] | None = None,
    start_iteration: int = 0,
    noise: SeedPerturb | None = None,
    noise_key: int = DEFAULT_SEED,
    block_depth: int | None = None,
    emit: Callable[[np.ndarray, np.ndarray], None] | None = None,
) -> ExpandResult:
    """Expand meta-edges depth first to the final iteration.

    By default the stack starts from the seed's own edges at iteration 0;
    `start` expands a specific list at `start_iteration` instead. Subtrees
    of at most `block_depth` remaining levels are emitted via precomputed
    offset tables in exactly the order the literal stack would produce;
    the reported stack depth is really instrumented and never exceeds the
    all-literal depth. Per-step perturbation disables the fast path since
    every replacement resamples the seed.
    """
    T = iterations
    if T < 0:
        raise ConfigError(f"iterations must be >= 0, got {T}")
    if not 0 <= start_iteration <= T:
        raise ConfigError(
            f"start iteration {start_iteration} outside [0, {T}]"
        )
    n0 = seed.n0
    if n0 ** (T + 1) > _MAX_VERTICES:
        raise ConfigError(
            f"expanded vertex count {n0}^{T + 1} exceeds the supported 2^62"
        )
    base_r, base_c = seed.nonzero_offsets()
    e0 = base_r.size
    if start is None:
        if e0 == 0:
            raise ConfigError("seed needs at least one edge")
        stack: list[MetaEdge] = [
            (start_iteration, int(r), int(c)) for r, c in zip(base_r, base_c)
        ]
    else:
        stack = [(start_iteration, int(r), int(c)) for r, c in start]

    max_rem = T - start_iteration
    if noise is not None:
        block = 0
    elif block_depth is None:
        block = _auto_block_depth(e0, max_rem)
    else:
        block = max(0, min(block_depth, max_rem))
    tables = _leaf_tables(seed, block)

    out_r: list[np.ndarray] = []
    out_c: list[np.ndarray] = []
    count = 0
    depth_max = len(stack)
    while stack:
        i, r, c = stack.pop()
        rem = T - i
        if rem <= block:
            tr, tc = tables[rem]
            scale = n0 ** rem
            rows = r * scale + tr
            cols = c * scale + tc
            if emit is not None:
                emit(rows, cols)
            else:
                out_r.append(rows)
                out_c.append(cols)
            count += rows.size
            continue
        rr, cc = _child_offsets(seed, noise, noise_key, i, r, c)
        rbase = r * n0
        cbase = c * n0
        stack.extend(
            (i + 1, rbase + int(rr[t]), cbase + int(cc[t])) for t in range(rr.size)
        )
        if len(stack) > depth_max:
            depth_max = len(stack)

    if emit is not None:
        return ExpandResult(None, count, depth_max)
    if out_r:
        edges = np.column_stack(
            [np.concatenate(out_r), np.concatenate(out_c)]
        ).astype(np.uint64)
    else:
        edges = np.empty((0, 2), dtype=np.uint64)
    return ExpandResult(edges, count, depth_max)


def stack_depth_bound(e0: int, iterations: int) -> int:
    """Worst-case stack size of a full expansion from the seed's edges."""
    return 1 + (e0 - 1) * (iterations + 1)


def kronecker_product(
    a: np.ndarray, b: np.ndarray, max_cells: int = 10_000_000
) -> np.ndarray:
    """Dense boolean Kronecker product, capped to keep oracles small.

    Reference route for checking the stack expansion; the generators
    never materialise matrices like this.
    """
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    cells = a.size * b.size
    if cells > max_cells:
        raise ConfigError(
            f"dense product would hold {cells} cells, over the {max_cells} cap"
        )
    return np.kron(a.astype(np.uint8), b.astype(np.uint8)).astype(bool)


def kronecker_power(
    seed: SeedGraph, iterations: int, max_cells: int = 10_000_000
) -> np.ndarray:
    """Dense (iterations + 1)-fold power of the seed matrix."""
    if iterations < 0:
        raise ConfigError(f"iterations must be >= 0, got {iterations}")
    result = seed.matrix
    for _ in range(iterations):
        result = kronecker_product(result, seed.matrix, max_cells)
    return result


def apply_er_flip(
    graph: EdgeList, flips: int, rng: np.random.Generator
) -> EdgeList:
    """Toggle `flips` uniformly sampled cells in the edge set.

    Present cells are removed, absent ones appended; a cell sampled twice
    is restored. Surviving edges keep their original order (duplicate
    input pairs collapse to one, set semantics).
    """
    if flips < 0:
        raise ConfigError(f"flip count must be >= 0, got {flips}")
    if flips and graph.vertex_count == 0:
        raise ConfigError("cannot flip cells of a graph with no vertices")
    present: dict[tuple[int, int], None] = dict.fromkeys(
        (int(u), int(v)) for u, v in graph.edges
    )
    cells = rng.integers(0, graph.vertex_count, size=(flips, 2), dtype=np.uint64)
    for u, v in cells:
        cell = (int(u), int(v))
        if cell in present:
            del present[cell]
        else:
            present[cell] = None
    if present:
        edges = np.asarray(list(present), dtype=np.uint64)
    else:
        edges = np.empty((0, 2), dtype=np.uint64)
    return EdgeList(edges, graph.vertex_count, graph.directed)


@dataclass(frozen=True)
class PkRun:
    edges: EdgeList
    per_rank_edges: list[int]
    max_stack_depth: int


def _rank_walk(
    rank: int, nranks: int, seed: SeedGraph, params: PkParams
) -> tuple[np.ndarray, int]:
    """One rank's communication-free share of the expansion."""
    T = params.iterations
    noise = params.noise if isinstance(params.noise, SeedPerturb) else None
    key = params.master_seed
    n0 = seed.n0
    base_r, base_c = seed.nonzero_offsets()
    edges: list[tuple[int, int]] = [
        (int(r), int(c)) for r, c in zip(base_r, base_c)
    ]
    lo, hi = 0, nranks
    iteration = 0
    while True:
        g = hi - lo
        m = len(edges)
        if m == 0:
            return np.empty((0, 2), dtype=np.uint64), 0
        if g <= m:
            elo, ehi = even_split(m, g)[rank - lo]
            res = expand_meta_edges(
                seed,
                T,
                start=edges[elo:ehi],
                start_iteration=iteration,
                noise=noise,
                noise_key=key,
            )
            return res.edges, res.max_stack_depth
        if iteration == T:
            # more ranks than final edges: the lowest rank emits the list
            if rank == lo:
                res = expand_meta_edges(
                    seed, T, start=edges, start_iteration=T,
                    noise=noise, noise_key=key,
                )
                return res.edges, res.max_stack_depth
            return np.empty((0, 2), dtype=np.uint64), 0
        bounds = even_split(g, m)
        rel = rank - lo
        j = next(j for j, (plo, phi) in enumerate(bounds) if plo <= rel < phi)
        row, col = edges[j]
        rr, cc = _child_offsets(seed, noise, key, iteration, row, col)
        edges = [
            (row * n0 + int(a), col * n0 + int(b)) for a, b in zip(rr, cc)
        ]
        lo, hi = lo + bounds[j][0], lo + bounds[j][1]
        iteration += 1


def run_pk(
    nranks: int,
    seed: SeedGraph,
    params: PkParams,
    *,
    workers: int = 1,
    debug=None,
) -> PkRun:
    """Expand the seed across ranks; returns edges plus instrumentation.

    The output multiset is independent of the rank and worker counts; the
    edge sequence is the rank-order concatenation of per-rank output.
    """
    if nranks < 1:
        raise ConfigError(f"rank count must be >= 1, got {nranks}")
    if seed.e0 < 1:
        raise ConfigError("seed needs at least one edge")
    vertex_count = seed.n0 ** (params.iterations + 1)
    if vertex_count > _MAX_VERTICES:
        raise ConfigError(
            f"expanded vertex count {seed.n0}^{params.iterations + 1} "
            f"exceeds the supported 2^62"
        )

    def program(ctx: RankContext):
        return _rank_walk(ctx.rank, nranks, seed, params)

    outputs = run_ranks(
        nranks, program, workers=workers, master_seed=params.master_seed,
        debug=debug,
    )
    arrays = [edges for edges, _ in outputs]
    depths = [depth for _, depth in outputs]
    stacked = np.concatenate(arrays) if arrays else np.empty((0, 2), dtype=np.uint64)
    graph = EdgeList(stacked, vertex_count, directed=True)
    if isinstance(params.noise, ErFlip):
        rng = np.random.default_rng((params.master_seed, _ER_FLIP_STREAM))
        graph = apply_er_flip(graph, params.noise.flips, rng)
    return PkRun(graph, [a.shape[0] for a in arrays], max(depths))


def generate_pk(
    nranks: int,
    seed: SeedGraph,
    params: PkParams,
    *,
    workers: int = 1,
) -> EdgeList:
    return run_pk(nranks, seed, params, workers=workers).edges
