"""Degree, path, and raster metrics over generated edge lists.

Every metric works on the simple undirected view of a graph: edges are
folded to canonical (min, max) order and deduplicated first, so directed
and undirected inputs measure the same. A self-loop contributes 2 to its
vertex's degree and nothing to any path.

Degree tails are fitted on logarithmic bins: degrees are grouped by
floor(log2(d)), each bin's mass is divided by its width to get a density,
and an ordinary least-squares line through (log center, log density)
gives the power-law exponent as the negated slope. At least three
occupied bins are required.

Path statistics run plain breadth-first searches from a sample of source
vertices. Sources are a prefix of one seeded permutation of the vertex
ids, so a larger sample always contains every smaller one and sampled
figures improve monotonically toward the exact ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import DEFAULT_SEED, ConfigError, EdgeList

_LOG2_CENTER_SHIFT = np.sqrt(2.0)  # geometric center of [2^b, 2^(b+1))


class MetricsError(RuntimeError):
    """A metric could not be computed from the given graph."""


class InsufficientDataError(MetricsError):
    """Not enough mass or spread in the data for a meaningful result."""


def undirected_simple_edges(graph: EdgeList) -> np.ndarray:
    """Canonical (min, max) edge pairs, deduplicated and sorted."""
    edges = graph.edges
    if edges.size == 0:
        return np.empty((0, 2), dtype=np.uint64)
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    return np.unique(np.column_stack([lo, hi]), axis=0)


def degree_distribution(graph: EdgeList) -> np.ndarray:
    """Per-vertex degree of the simple undirected view, length vertex_count."""
    arr = undirected_simple_edges(graph)
    V = graph.vertex_count
    if arr.size == 0:
        return np.zeros(V, dtype=np.int64)
    deg = np.bincount(arr[:, 0].astype(np.int64), minlength=V)
    deg += np.bincount(arr[:, 1].astype(np.int64), minlength=V)
    return deg.astype(np.int64)


@dataclass(frozen=True)
class DegreeHistogram:
    degrees: np.ndarray  # distinct degree values, ascending
    counts: np.ndarray   # vertices with each degree


def degree_histogram(graph: EdgeList) -> DegreeHistogram:
    deg = degree_distribution(graph)
    values, counts = np.unique(deg, return_counts=True)
    return DegreeHistogram(values.astype(np.int64), counts.astype(np.int64))


def write_degree_csv(hist: DegreeHistogram, dest: str | Path) -> None:
    """Write "degree,count" rows, one per distinct degree."""
    with open(dest, "w", encoding="ascii") as fh:
        fh.write("degree,count\n")
        for d, c in zip(hist.degrees, hist.counts):
            fh.write(f"{int(d)},{int(c)}\n")


@dataclass(frozen=True)
class PowerLawFit:
    gamma: float
    intercept: float
    bins_used: int
    r_squared: float


def fit_power_law(degrees: np.ndarray, *, min_degree: int = 1) -> PowerLawFit:
    """Fit degree density ~ d^-gamma on log2 bins; see the module docstring.

    min_degree drops the head of the distribution before binning, which
    helps when the low-degree bins do not follow the tail law.
    """
    deg = np.asarray(degrees, dtype=np.int64)
    deg = deg[deg >= max(1, min_degree)]
    if deg.size == 0:
        raise InsufficientDataError("no degrees at or above the fit threshold")
    bins = np.floor(np.log2(deg.astype(np.float64))).astype(np.int64)
    mass = np.bincount(bins)
    occupied = np.flatnonzero(mass)
    if occupied.size < 3:
        raise InsufficientDataError(
            f"power-law fit needs >= 3 occupied bins, got {occupied.size}"
        )
    width = np.exp2(occupied.astype(np.float64))
    density = mass[occupied] / width
    x = np.log(width * _LOG2_CENTER_SHIFT)
    y = np.log(density)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return PowerLawFit(
        gamma=float(-slope),
        intercept=float(intercept),
        bins_used=int(occupied.size),
        r_squared=r_squared,
    )


@dataclass(frozen=True)
class PathStats:
    source_count: int
    reachable_pairs: int  # ordered (source, target) pairs, target != source
    total_distance: int
    avg_path_length: float
    diameter: int  # largest distance seen from any sampled source


def _adjacency(graph: EdgeList) -> tuple[np.ndarray, np.ndarray]:
    arr = undirected_simple_edges(graph)
    V = graph.vertex_count
    arr = arr[arr[:, 0] != arr[:, 1]]  # loops never lie on a shortest path
    src = np.concatenate([arr[:, 0], arr[:, 1]]).astype(np.int64)
    dst = np.concatenate([arr[:, 1], arr[:, 0]]).astype(np.int64)
    order = np.argsort(src, kind="stable")
    col = dst[order]
    counts = np.bincount(src, minlength=V)
    indptr = np.zeros(V + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, col


def _bfs_distances(indptr: np.ndarray, col: np.ndarray, source: int) -> np.ndarray:
    V = indptr.size - 1
    dist = np.full(V, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.asarray([source], dtype=np.int64)
    level = 0
    while frontier.size:
        starts = indptr[frontier]
        lens = indptr[frontier + 1] - starts
        total = int(lens.sum())
        if total == 0:
            break
        # ragged gather of every frontier vertex's neighbour slice
        offsets = np.zeros(frontier.size, dtype=np.int64)
        np.cumsum(lens[:-1], out=offsets[1:])
        idx = np.repeat(starts - offsets, lens) + np.arange(total, dtype=np.int64)
        cand = col[idx]
        cand = cand[dist[cand] < 0]
        if cand.size == 0:
            break
        seen = np.zeros(V, dtype=bool)
        seen[cand] = True
        frontier = np.flatnonzero(seen)
        level += 1
        dist[frontier] = level
    return dist


def resolve_source_count(graph: EdgeList, sources: int | str) -> int:
    V = graph.vertex_count
    if sources == "all":
        return V
    if sources == "auto":
        return min(V, max(32, -(-V // 1000)))
    count = int(sources)
    if count < 1:
        raise ConfigError(f"source count must be >= 1, got {sources}")
    return min(V, count)


def path_stats(
    graph: EdgeList,
    sources: int | str = "auto",
    *,
    seed: int = DEFAULT_SEED,
) -> PathStats:
    """Breadth-first path statistics from sampled sources.

    sources is "all", "auto" (the larger of 32 and 0.1% of the vertices),
    or an explicit count. Unreachable pairs are excluded; with sampling,
    the diameter is the largest distance actually observed.
    """
    V = graph.vertex_count
    if V == 0:
        raise MetricsError("graph has no vertices")
    count = resolve_source_count(graph, sources)
    perm = np.random.default_rng(seed).permutation(V)
    picked = perm[:count]
    indptr, col = _adjacency(graph)

    pairs = 0
    total = 0
    diameter = 0
    for s in picked:
        dist = _bfs_distances(indptr, col, int(s))
        reached = dist[dist > 0]
        if reached.size:
            pairs += int(reached.size)
            total += int(reached.sum())
            ecc = int(reached.max())
            if ecc > diameter:
                diameter = ecc
    if pairs == 0:
        raise InsufficientDataError(
            "no vertex pair sampled so far is connected by any path"
        )
    return PathStats(
        source_count=int(count),
        reachable_pairs=pairs,
        total_distance=total,
        avg_path_length=total / pairs,
        diameter=diameter,
    )


def adjacency_raster(graph: EdgeList, size: int = 512) -> np.ndarray:
    """Downsampled adjacency heat map as a (size, size) uint8 image.

    Cell intensity is the log-scaled count of edges mapping into it; both
    directions of each undirected pair are plotted.
    """
    if size < 1:
        raise ConfigError(f"raster size must be >= 1, got {size}")
    V = graph.vertex_count
    grid = np.zeros((size, size), dtype=np.int64)
    if V and graph.edge_count:
        arr = undirected_simple_edges(graph).astype(np.int64)
        r = (arr[:, 0] * size) // V
        c = (arr[:, 1] * size) // V
        cells = size * size
        flat = np.bincount(r * size + c, minlength=cells)
        flat += np.bincount(c * size + r, minlength=cells)
        loops = r[arr[:, 0] == arr[:, 1]]
        if loops.size:  # a loop's cell was counted from both directions
            flat -= np.bincount(loops * size + loops, minlength=cells)
        grid = flat.reshape(size, size)
    peak = grid.max()
    if peak == 0:
        return np.zeros((size, size), dtype=np.uint8)
    scaled = np.log1p(grid) * (255.0 / np.log1p(peak))
    return np.rint(scaled).astype(np.uint8)


def write_pgm(
    image: np.ndarray, dest: str | Path, *, binary: bool = True
) -> None:
    """Write a grayscale image as PGM, binary P5 or ascii P2."""
    img = np.ascontiguousarray(image, dtype=np.uint8)
    if img.ndim != 2:
        raise ConfigError(f"image must be 2-D, got shape {img.shape}")
    h, w = img.shape
    if binary:
        with open(dest, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(img.tobytes())
        return
    with open(dest, "w", encoding="ascii") as fh:
        fh.write(f"P2\n{w} {h}\n255\n")
        for row in img:
            fh.write(" ".join(str(int(v)) for v in row))
            fh.write("\n")
