"""Edge-list container, block vertex ownership, and on-disk formats.

Graphs are stored as flat (u, v) pairs with an explicit vertex count.
Multigraph semantics: duplicate pairs and self-loops are kept as produced;
callers that need a simple graph pass dedupe=True when writing.

Two interchangeable formats:

* text: one "u v" pair per line, "#" comments and blank lines ignored
* binary: 16-byte header (magic "GGEL", u32 version, u64 vertex count)
  followed by consecutive little-endian u64 pairs
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"GGEL"
FORMAT_VERSION = 1
DEFAULT_SEED = 42

_HEADER = struct.Struct("<4sIQ")


class ConfigError(ValueError):
    """Invalid generator or run configuration."""


class FormatError(ValueError):
    """Malformed graph file or unparseable input."""


@dataclass(frozen=True)
class Partition:
    """Block distribution of vertices over ranks.

    Rank p owns the contiguous block [p * n, (p + 1) * n) where n is
    vertices_per_rank, so ownership is pure arithmetic and needs no lookup
    table.
    """

    ranks: int
    vertices_per_rank: int

    def __post_init__(self) -> None:
        if self.ranks < 1:
            raise ConfigError(f"rank count must be >= 1, got {self.ranks}")
        if self.vertices_per_rank < 1:
            raise ConfigError(
                f"vertices per rank must be >= 1, got {self.vertices_per_rank}"
            )

    @property
    def total_vertices(self) -> int:
        return self.ranks * self.vertices_per_rank

    def owner_of(self, vertex: int) -> int:
        """Rank owning the vertex; raises for ids outside the vertex range."""
        if not 0 <= vertex < self.total_vertices:
            raise ConfigError(
                f"vertex {vertex} outside range [0, {self.total_vertices})"
            )
        return int(vertex) // self.vertices_per_rank

    def local_index(self, vertex: int) -> int:
        self.owner_of(vertex)
        return int(vertex) % self.vertices_per_rank

    def rank_base(self, rank: int) -> int:
        """First global vertex id owned by the rank."""
        if not 0 <= rank < self.ranks:
            raise ConfigError(f"rank {rank} outside range [0, {self.ranks})")
        return rank * self.vertices_per_rank


@dataclass(frozen=True, eq=False)
class EdgeList:
    """Immutable (m, 2) array of edges plus the graph's vertex count.

    The backing array is marked read-only so values can be shared across
    worker threads without copies.
    """

    edges: np.ndarray
    vertex_count: int
    directed: bool = True

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.edges, dtype=np.uint64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ConfigError(f"edge array must have shape (m, 2), got {arr.shape}")
        if self.vertex_count < 0:
            raise ConfigError("vertex count must be non-negative")
        if arr.size and int(arr.max()) >= self.vertex_count:
            raise ConfigError(
                f"endpoint {int(arr.max())} outside vertex range "
                f"[0, {self.vertex_count})"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "edges", arr)

    @property
    def edge_count(self) -> int:
        return self.edges.shape[0]

    def __len__(self) -> int:
        return self.edges.shape[0]


def empty_edge_list(vertex_count: int = 0, directed: bool = True) -> EdgeList:
    return EdgeList(np.empty((0, 2), dtype=np.uint64), vertex_count, directed)


def _dedupe(edges: np.ndarray) -> np.ndarray:
    # sort-unique; self-loops are legitimate simple-graph edges and stay
    if edges.size == 0:
        return edges
    return np.unique(edges, axis=0)


def write_edge_list(
    graph: EdgeList,
    dest: str | Path,
    fmt: str = "text",
    dedupe: bool = False,
) -> int:
    """Write the graph to dest; returns the number of bytes written."""
    edges = _dedupe(graph.edges) if dedupe else graph.edges
    dest = Path(dest)
    if fmt == "text":
        written = 0
        with open(dest, "w", encoding="ascii") as fh:
            for lo in range(0, edges.shape[0], 1 << 20):
                block = edges[lo : lo + (1 << 20)]
                chunk = "".join(f"{int(u)} {int(v)}\n" for u, v in block)
                fh.write(chunk)
                written += len(chunk)
        return written
    if fmt == "binary":
        header = _HEADER.pack(MAGIC, FORMAT_VERSION, graph.vertex_count)
        payload = np.ascontiguousarray(edges, dtype="<u8").tobytes()
        with open(dest, "wb") as fh:
            fh.write(header)
            fh.write(payload)
        return len(header) + len(payload)
    raise ConfigError(f"unknown edge list format {fmt!r}")


def _read_text(path: Path, directed: bool) -> EdgeList:
    us: list[int] = []
    vs: list[int] = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise FormatError(
                    f"{path}:{lineno}: expected 'u v', got {raw.strip()!r}"
                )
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise FormatError(
                    f"{path}:{lineno}: non-numeric endpoint in {raw.strip()!r}"
                ) from exc
            if u < 0 or v < 0:
                raise FormatError(f"{path}:{lineno}: negative endpoint")
            us.append(u)
            vs.append(v)
    if not us:
        return empty_edge_list(0, directed)
    edges = np.column_stack(
        [np.asarray(us, dtype=np.uint64), np.asarray(vs, dtype=np.uint64)]
    )
    return EdgeList(edges, int(edges.max()) + 1, directed)


def _read_binary(path: Path, directed: bool) -> EdgeList:
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: truncated header, {len(blob)} bytes")
    magic, version, vertex_count = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    payload = len(blob) - _HEADER.size
    if payload % 16:
        raise FormatError(
            f"{path}: truncated payload at byte offset {len(blob)}"
            f" (not a whole number of u64 pairs)"
        )
    edges = np.frombuffer(blob, dtype="<u8", offset=_HEADER.size).reshape(-1, 2)
    return EdgeList(edges.copy(), int(vertex_count), directed)


def read_edge_list(
    source: str | Path, fmt: str = "auto", directed: bool = True
) -> EdgeList:
    """Read a graph written by write_edge_list.

    fmt "auto" sniffs the binary magic and falls back to text.
    """
    path = Path(source)
    if fmt == "auto":
        try:
            with open(path, "rb") as fh:
                fmt = "binary" if fh.read(4) == MAGIC else "text"
        except OSError as exc:
            raise FormatError(f"{path}: {exc}") from exc
    if fmt == "text":
        return _read_text(path, directed)
    if fmt == "binary":
        return _read_binary(path, directed)
    raise ConfigError(f"unknown edge list format {fmt!r}")
