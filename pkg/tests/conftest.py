from pathlib import Path

import numpy as np
import pytest

from scalegraph import FactionConfig, SeedGraph, demo_seed

FIXTURES = Path(__file__).parent / "fixtures"


def edge_multiset(edges: np.ndarray):
    """Order-insensitive view of an (m, 2) edge array for comparisons."""
    arr = np.ascontiguousarray(edges, dtype=np.uint64)
    structured = arr.view([("u", "<u8"), ("v", "<u8")]).ravel()
    return np.sort(structured)


def edge_set(edges: np.ndarray) -> set:
    return {(int(u), int(v)) for u, v in np.asarray(edges)}


def scipy_path_oracle(graph) -> tuple[int, int, int]:
    """(reachable ordered pairs, total distance, diameter) via scipy BFS."""
    import scipy.sparse
    import scipy.sparse.csgraph

    from scalegraph import undirected_simple_edges

    V = graph.vertex_count
    arr = undirected_simple_edges(graph).astype(np.int64)
    arr = arr[arr[:, 0] != arr[:, 1]]
    data = np.ones(arr.shape[0], dtype=np.int8)
    mat = scipy.sparse.coo_matrix(
        (data, (arr[:, 0], arr[:, 1])), shape=(V, V)
    ).tocsr()
    dist = scipy.sparse.csgraph.shortest_path(
        mat, directed=False, unweighted=True
    )
    off = ~np.eye(V, dtype=bool)
    finite = np.isfinite(dist) & off
    return (
        int(finite.sum()),
        int(dist[finite].sum()),
        int(dist[finite].max(initial=0)),
    )


def integral_mass_degrees(gamma: float, scale: float, bins: int) -> np.ndarray:
    """Degrees whose log2-bin masses follow an exact power-law density.

    Within a bin the density is mass / width; placing every sampled degree
    at the bin's low edge leaves the binned fit unchanged, so these arrays
    recover gamma up to mass rounding.
    """
    k = (1.0 - 2.0 ** (1.0 - gamma)) / (gamma - 1.0)
    parts = []
    for b in range(bins):
        mass = int(round(scale * (2.0**b) ** (1.0 - gamma) * k))
        parts.append(np.full(mass, 2**b, dtype=np.int64))
    return np.concatenate(parts)


@pytest.fixture
def fig_factions() -> FactionConfig:
    # F0={1,2}, F1={1,3}, F2={0,1}; rank 0 assigned F0 and F2
    return FactionConfig.build(4, [[1, 2], [1, 3], [0, 1]], {0: [0, 2]})


@pytest.fixture
def hub_seed() -> SeedGraph:
    return demo_seed()


@pytest.fixture
def ring3_seed() -> SeedGraph:
    return SeedGraph.from_pairs(
        3, [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2), (0, 2)]
    )


@pytest.fixture
def grid4_seed() -> SeedGraph:
    return SeedGraph.from_pairs(
        4,
        [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1),
         (2, 0), (2, 2), (3, 3), (0, 3), (1, 3)],
    )
