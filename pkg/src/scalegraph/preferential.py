"""Two-phase distributed preferential attachment over block-owned vertices.

Phase 1: each rank builds an association list of n * k target ranks. The
first entries are the concatenated members of the rank's assigned
factions; every later entry either copies the target of a uniformly
chosen earlier entry (rank-level preferential attachment) or, with the
configured probability, picks a uniform rank outside all of the rank's
factions. Entry j belongs to local vertex j // k. The rank then announces
to every rank how many endpoints it needs from it.

Phase 2: each rank serves the announced requests by preferential draws
over its own vertices (ascending requester order, one shared pool) and
sends the endpoint lists back. Local vertices enter the pool staggered
across the serve sequence and every draw adds one extra copy of the drawn
vertex, so early vertices accumulate attachment mass the way they do in
the serial model. Each rank then substitutes the i-th received endpoint
from rank q for the i-th occurrence of q in its association list, which
yields the rank's final edges.

The RNG draw discipline is fixed so a single-threaded replay consuming
the same stream reproduces every choice: phase 1 draws up to three
equal-length blocks of uniforms (inter-faction coin flips, copy indices,
inter-faction choices; the flip and choice blocks only exist when the
inter-faction probability is effective), then phase 2 draws one block of
uniforms, one per served endpoint. Uniform u maps to index floor(u * m).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .core import ConfigError, DEFAULT_SEED, EdgeList
from .factions import FactionConfig
from .transport import (
    KIND_COUNTS,
    KIND_ENDPOINTS,
    ProtocolError,
    RankContext,
    run_ranks,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PbaParams:
    vertices_per_rank: int
    edges_per_vertex: int
    inter_faction_prob: float = 0.0
    master_seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.vertices_per_rank < 1:
            raise ConfigError(
                f"vertices per rank must be >= 1, got {self.vertices_per_rank}"
            )
        if self.edges_per_vertex < 1:
            raise ConfigError(
                f"edges per vertex must be >= 1, got {self.edges_per_vertex}"
            )
        if not 0.0 <= self.inter_faction_prob <= 1.0:
            raise ConfigError(
                f"inter-faction probability must be in [0, 1], got "
                f"{self.inter_faction_prob}"
            )


@dataclass(frozen=True)
class AssocList:
    """Phase-1 output: target rank per edge slot, k slots per local vertex."""

    targets: np.ndarray  # int64, length n * k
    edges_per_vertex: int

    @property
    def entry_count(self) -> int:
        return self.targets.size

    def local_vertices(self) -> np.ndarray:
        """Local vertex index owning each entry."""
        return np.arange(self.targets.size, dtype=np.int64) // self.edges_per_vertex


@dataclass(frozen=True)
class RankTrace:
    """Instrumentation captured per rank during a generator run."""

    rank: int
    prefix_targets: tuple[int, ...]
    announced: np.ndarray      # endpoints requested of each rank
    reply_lengths: np.ndarray  # endpoint-list lengths received from each rank
    edge_count: int


@dataclass(frozen=True)
class PbaRun:
    edges: EdgeList
    traces: list[RankTrace]

    @property
    def per_rank_edges(self) -> list[int]:
        return [t.edge_count for t in self.traces]


class EndpointPool:
    """Growing multiset of a rank's vertices for preferential selection.

    Not-yet-introduced members join the pool evenly spread across each
    draw call; every draw appends one extra copy of the drawn vertex.
    Draw t of a call is uniform over the introduced members plus all
    prior draws.
    """

    def __init__(self, members: np.ndarray | list[int]):
        self._members = np.ascontiguousarray(members, dtype=np.int64)
        self._introduced = 0
        self._drawn = np.empty(0, dtype=np.int64)

    def __len__(self) -> int:
        return self._introduced + self._drawn.size

    def draw(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if count == 0:
            return np.empty(0, dtype=np.int64)
        remaining = self._members.size - self._introduced
        if self._members.size == 0:
            raise ConfigError("selection requested from an empty pool")
        t = np.arange(count, dtype=np.int64)
        if remaining > 0:
            intro = self._introduced + np.minimum(
                remaining, (t * remaining) // count + 1
            )
        else:
            intro = np.full(count, self._introduced, dtype=np.int64)
        prior = self._drawn.size
        u = rng.random(count)
        slots = (u * (intro + prior + t)).astype(np.int64)

        vals = np.empty(count, dtype=np.int64)
        direct = slots < intro
        vals[direct] = self._members[slots[direct]]
        ref = slots - intro  # index into prior draws then this call's draws
        old = ~direct & (ref < prior)
        vals[old] = self._drawn[ref[old]]
        resolved = direct | old
        pending = np.flatnonzero(~resolved)
        while pending.size:
            local = ref[pending] - prior  # strictly earlier draw of this call
            ok = resolved[local]
            sel = pending[ok]
            vals[sel] = vals[ref[sel] - prior]
            resolved[sel] = True
            pending = pending[~ok]

        self._introduced = int(intro[-1])
        self._drawn = np.concatenate([self._drawn, vals])
        return vals


def faction_prefix(rank: int, factions: FactionConfig) -> np.ndarray:
    """First association-list targets: the rank's assigned factions, flattened."""
    return factions.prefix_targets(rank)


def phase1_associate(
    rank: int,
    params: PbaParams,
    factions: FactionConfig,
    rng: np.random.Generator,
) -> tuple[AssocList, np.ndarray]:
    """Build the rank's association list; returns it with per-rank counts."""
    nranks = factions.nranks
    n, k = params.vertices_per_rank, params.edges_per_vertex
    nk = n * k
    prefix = factions.prefix_targets(rank)
    s = prefix.size
    if s > nk:
        raise ConfigError(
            f"rank {rank}: faction prefix length {s} exceeds "
            f"vertices * edges-per-vertex = {nk}"
        )
    targets = np.empty(nk, dtype=np.int64)
    targets[:s] = prefix

    q = params.inter_faction_prob
    complement = np.asarray(
        sorted(set(range(nranks)) - factions.faction_union(rank)), dtype=np.int64
    )
    if q > 0.0 and complement.size == 0:
        log.warning(
            "rank %d: every rank is inside its factions, inter-faction "
            "probability %g treated as 0",
            rank,
            q,
        )
        q = 0.0

    count = nk - s
    if count:
        flips = rng.random(count) < q if q > 0.0 else None
        copy_idx = (rng.random(count) * np.arange(s, nk)).astype(np.int64)
        resolved = np.zeros(nk, dtype=bool)
        resolved[:s] = True
        if flips is not None:
            choices = complement[
                (rng.random(count) * complement.size).astype(np.int64)
            ]
            fpos = s + np.flatnonzero(flips)
            targets[fpos] = choices[flips]
            resolved[fpos] = True
        parent = np.empty(nk, dtype=np.int64)
        parent[:s] = np.arange(s)
        parent[s:] = copy_idx
        pending = np.flatnonzero(~resolved)
        while pending.size:
            ok = resolved[parent[pending]]
            sel = pending[ok]
            targets[sel] = targets[parent[sel]]
            resolved[sel] = True
            pending = pending[~ok]

    counts = np.bincount(targets, minlength=nranks)
    return AssocList(targets, k), counts


def phase2_serve(
    requests: Mapping[int, int],
    pool: EndpointPool,
    rng: np.random.Generator,
    nranks: int | None = None,
) -> dict[int, np.ndarray]:
    """Serve endpoint requests preferentially, ascending requester order.

    One shared pool backs the whole batch, so earlier requesters shape
    the draws seen by later ones.
    """
    for rank, count in requests.items():
        if rank < 0 or (nranks is not None and rank >= nranks):
            raise ProtocolError(f"request from unknown rank {rank}")
        if count < 0:
            raise ProtocolError(f"negative request count from rank {rank}")
    order = sorted(requests)
    total = sum(requests[r] for r in order)
    drawn = pool.draw(total, rng)
    replies: dict[int, np.ndarray] = {}
    offset = 0
    for rank in order:
        m = requests[rank]
        replies[rank] = drawn[offset : offset + m]
        offset += m
    return replies


def phase2_substitute(
    assoc: AssocList,
    replies: Mapping[int, np.ndarray],
    base: int = 0,
) -> np.ndarray:
    """Replace rank targets with served endpoints; returns (m, 2) edges.

    The i-th occurrence of rank q in the association list takes the i-th
    endpoint of q's reply. `base` is the global id of local vertex 0.
    """
    targets = assoc.targets
    endpoints = np.empty(targets.size, dtype=np.int64)
    covered = 0
    for rank in sorted(replies):
        pos = np.flatnonzero(targets == rank)
        reply = np.asarray(replies[rank], dtype=np.int64)
        if pos.size != reply.size:
            raise ProtocolError(
                f"rank {rank}: announced {pos.size} endpoints, received {reply.size}"
            )
        endpoints[pos] = reply
        covered += pos.size
    if covered != targets.size:
        missing = sorted(set(np.unique(targets).tolist()) - set(replies))
        raise ProtocolError(f"no endpoint list received from ranks {missing}")
    u = base + np.arange(targets.size, dtype=np.int64) // assoc.edges_per_vertex
    return np.column_stack([u, endpoints]).astype(np.uint64)


def _pba_program(params: PbaParams, factions: FactionConfig):
    nranks = factions.nranks
    n = params.vertices_per_rank

    def program(ctx: RankContext):
        base = ctx.rank * n
        assoc, counts = phase1_associate(ctx.rank, params, factions, ctx.rng)
        for dst in range(nranks):
            ctx.send(dst, KIND_COUNTS, [counts[dst]])
        inbox = yield

        requests = {m.src: int(m.payload[0]) for m in inbox}
        if len(requests) != nranks:
            raise ProtocolError(
                f"rank {ctx.rank}: expected counts from {nranks} ranks, "
                f"got {sorted(requests)}"
            )
        pool = EndpointPool(base + np.arange(n, dtype=np.int64))
        replies = phase2_serve(requests, pool, ctx.rng, nranks=nranks)
        for dst in range(nranks):
            ctx.send(dst, KIND_ENDPOINTS, replies[dst])
        inbox = yield

        received = {m.src: m.payload.astype(np.int64) for m in inbox}
        edges = phase2_substitute(assoc, received, base=base)
        trace = RankTrace(
            rank=ctx.rank,
            prefix_targets=tuple(int(t) for t in factions.prefix_targets(ctx.rank)),
            announced=counts.copy(),
            reply_lengths=np.asarray(
                [received[r].size if r in received else 0 for r in range(nranks)],
                dtype=np.int64,
            ),
            edge_count=edges.shape[0],
        )
        return edges, trace

    return program


def run_pba(
    params: PbaParams,
    factions: FactionConfig,
    *,
    workers: int = 1,
    debug=None,
) -> PbaRun:
    """Generate a graph and return it with per-rank instrumentation.

    Every vertex contributes exactly edges-per-vertex edges, so the edge
    count is ranks * vertices-per-rank * edges-per-vertex. Edges are
    undirected and stored once, on the rank owning the first endpoint.
    """
    nranks = factions.nranks
    n, k = params.vertices_per_rank, params.edges_per_vertex
    for rank in range(nranks):
        s = factions.prefix_len(rank)
        if s > n * k:
            raise ConfigError(
                f"rank {rank}: faction prefix length {s} exceeds "
                f"vertices * edges-per-vertex = {n * k}; raise vertices per "
                f"rank or edges per vertex"
            )
    outputs = run_ranks(
        nranks,
        _pba_program(params, factions),
        workers=workers,
        master_seed=params.master_seed,
        debug=debug,
    )
    arrays = [edges for edges, _ in outputs]
    traces = [trace for _, trace in outputs]
    stacked = (
        np.concatenate(arrays) if arrays else np.empty((0, 2), dtype=np.uint64)
    )
    graph = EdgeList(stacked, nranks * n, directed=False)
    return PbaRun(graph, traces)


def generate_pba(
    params: PbaParams,
    factions: FactionConfig,
    *,
    workers: int = 1,
) -> EdgeList:
    return run_pba(params, factions, workers=workers).edges
