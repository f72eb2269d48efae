"""Geometric graph construction and connectivity analysis.

Adjacency is built with a uniform spatial grid whose cell side is at least the
connection radius, so candidate pairs only come from 3x3 cell neighborhoods.
Two nodes are adjacent iff their distance is <= radius (ties included), using
the wrap-around metric on a torus region.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import TORUS, PointSet
from .unionfind import UnionFind

# Half of the 3x3 neighborhood: together with the within-cell pass, every
# unordered pair of neighboring cells is visited exactly once.
_HALF_OFFSETS = ((1, 0), (0, 1), (1, 1), (-1, 1))


@dataclass(frozen=True)
class SpatialGraph:
    """Immutable geometric graph: points, radius, CSR adjacency, edge list."""

    points: PointSet
    radius: float
    indptr: np.ndarray
    indices: np.ndarray
    edges: np.ndarray  # (E, 2), each row u < v
    degrees: np.ndarray

    def __post_init__(self):
        for name in ("indptr", "indices", "edges", "degrees"):
            getattr(self, name).setflags(write=False)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def node_count(self) -> int:
        return len(self.points)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    @property
    def adjacency(self) -> list[np.ndarray]:
        return [self.neighbors(i) for i in range(len(self))]

    def mean_degree(self) -> float:
        return float(self.degrees.mean()) if len(self) else 0.0


def _block_pairs(a_starts, a_counts, b_starts, b_counts):
    """Positions of all cartesian pairs across per-block slice ranges."""
    sizes = a_counts * b_counts
    total = int(sizes.sum())
    if total == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    block = np.repeat(np.arange(len(sizes)), sizes)
    offsets = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    t = np.arange(total) - offsets[block]
    nb = b_counts[block]
    left = a_starts[block] + t // nb
    right = b_starts[block] + t % nb
    return left, right


def build_graph(points: PointSet, radius: float = 1.0) -> SpatialGraph:
    """Connect every pair of points at distance <= radius."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    region = points.region
    n = len(points)
    coords = points.coordinates
    torus = region.boundary == TORUS

    if n >= 2:
        ncx = max(1, int(region.width / radius))
        ncy = max(1, int(region.height / radius))
        ix = np.minimum((coords[:, 0] * (ncx / region.width)).astype(np.int64), ncx - 1)
        iy = np.minimum((coords[:, 1] * (ncy / region.height)).astype(np.int64), ncy - 1)
        cell = iy * ncx + ix

        order = np.argsort(cell, kind="stable")
        ucell, ustart, ucount = np.unique(cell[order], return_index=True, return_counts=True)
        ucx = ucell % ncx
        ucy = ucell // ncx

        left, right = _block_pairs(ustart, ucount, ustart, ucount)
        keep = left < right
        lefts = [left[keep]]
        rights = [right[keep]]

        for dx, dy in _HALF_OFFSETS:
            nx = ucx + dx
            ny = ucy + dy
            if torus:
                nx %= ncx
                ny %= ncy
                valid = np.ones(len(ucell), dtype=bool)
            else:
                valid = (nx >= 0) & (nx < ncx) & (ny >= 0) & (ny < ncy)
            nid = ny * ncx + nx
            pos = np.searchsorted(ucell, nid[valid])
            pos = np.minimum(pos, len(ucell) - 1)
            found = ucell[pos] == nid[valid]
            a = np.flatnonzero(valid)[found]
            b = pos[found]
            l, r = _block_pairs(ustart[a], ucount[a], ustart[b], ucount[b])
            lefts.append(l)
            rights.append(r)

        i = order[np.concatenate(lefts)]
        j = order[np.concatenate(rights)]

        dx = np.abs(coords[i, 0] - coords[j, 0])
        dy = np.abs(coords[i, 1] - coords[j, 1])
        if torus:
            dx = np.minimum(dx, region.width - dx)
            dy = np.minimum(dy, region.height - dy)
        close = (dx * dx + dy * dy <= radius * radius) & (i != j)
        i, j = i[close], j[close]

        u = np.minimum(i, j)
        v = np.maximum(i, j)
        # unique also drops duplicates produced by wrap-around on tiny grids
        key = np.unique(u.astype(np.int64) * n + v)
        u = (key // n).astype(np.int64)
        v = (key % n).astype(np.int64)
        edges = np.column_stack([u, v])
    else:
        edges = np.empty((0, 2), dtype=np.int64)
        u = v = np.empty(0, dtype=np.int64)

    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    degrees = np.bincount(src, minlength=n).astype(np.int64)
    indptr = np.concatenate(([0], np.cumsum(degrees))).astype(np.int64)
    ordr = np.lexsort((dst, src))
    indices = dst[ordr].astype(np.int64)

    return SpatialGraph(points, float(radius), indptr, indices, edges, degrees)


@dataclass(frozen=True)
class ComponentLabeling:
    """Connected-component ids per node; dead nodes carry the sentinel -1."""

    labels: np.ndarray
    sizes: np.ndarray
    largest_id: int
    largest_size: int


def components(graph: SpatialGraph, alive) -> ComponentLabeling:
    """Union-find over edges whose endpoints are both alive."""
    n = len(graph)
    alive = np.asarray(alive, dtype=bool)
    if alive.shape != (n,):
        raise ValueError(f"alive mask length {alive.shape} does not match node count {n}")

    uf = UnionFind(n)
    e = graph.edges
    if len(e):
        both = alive[e[:, 0]] & alive[e[:, 1]]
        for a, b in zip(e[both, 0].tolist(), e[both, 1].tolist()):
            uf.union(a, b)

    labels = np.full(n, -1, dtype=np.int64)
    root_to_id: dict[int, int] = {}
    for i in np.flatnonzero(alive).tolist():
        r = uf.find(i)
        cid = root_to_id.setdefault(r, len(root_to_id))
        labels[i] = cid

    if root_to_id:
        sizes = np.bincount(labels[alive], minlength=len(root_to_id)).astype(np.int64)
        largest_id = int(np.argmax(sizes))
        largest_size = int(sizes[largest_id])
    else:
        sizes = np.zeros(0, dtype=np.int64)
        largest_id = -1
        largest_size = 0
    return ComponentLabeling(labels, sizes, largest_id, largest_size)


def _expand_frontier(graph: SpatialGraph, frontier: np.ndarray) -> np.ndarray:
    counts = graph.indptr[frontier + 1] - graph.indptr[frontier]
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    starts = np.repeat(graph.indptr[frontier], counts)
    offsets = np.repeat(np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    return graph.indices[np.arange(total) - offsets + starts]


def crosses(graph: SpatialGraph, alive, rect, direction: str = "left-right") -> bool:
    """Whether alive nodes inside rect form a crossing in the given direction.

    A left-right crossing is a connected sequence of alive nodes inside the
    rectangle whose first node lies strictly within distance radius of the left
    edge (0 < x - x1 < r) and whose last node lies strictly within radius of
    the right edge (0 < x2 - x < r); top-bottom is the 90-degree rotation.
    """
    region = graph.points.region
    if region.boundary == TORUS:
        raise ValueError("crossing is undefined on a torus region")
    x1, y1, x2, y2 = (float(c) for c in rect)
    if not (0 <= x1 < x2 <= region.width and 0 <= y1 < y2 <= region.height):
        raise ValueError(f"rect {rect} is not a proper rectangle inside the region")
    if direction not in ("left-right", "top-bottom"):
        raise ValueError(f"direction must be 'left-right' or 'top-bottom', got {direction!r}")

    n = len(graph)
    alive = np.asarray(alive, dtype=bool)
    if alive.shape != (n,):
        raise ValueError(f"alive mask length {alive.shape} does not match node count {n}")
    if n == 0:
        return False

    coords = graph.points.coordinates
    x, y = coords[:, 0], coords[:, 1]
    inside = alive & (x >= x1) & (x <= x2) & (y >= y1) & (y <= y2)
    if direction == "left-right":
        c, lo, hi = x, x1, x2
    else:
        c, lo, hi = y, y1, y2
    r = graph.radius
    start = inside & (c - lo > 0) & (c - lo < r)
    end = inside & (hi - c > 0) & (hi - c < r)
    if not start.any() or not end.any():
        return False
    if (start & end).any():
        return True

    visited = start.copy()
    frontier = np.flatnonzero(start)
    while frontier.size:
        nbrs = _expand_frontier(graph, frontier)
        fresh = nbrs[inside[nbrs] & ~visited[nbrs]]
        if fresh.size == 0:
            return False
        visited[fresh] = True
        if end[fresh].any():
            return True
        frontier = np.unique(fresh)
    return False
