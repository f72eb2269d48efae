import hypothesis
import numpy as np
import pytest

from geoperc.geometry import Region, generate_uniform
from geoperc.graph import build_graph

hypothesis.settings.register_profile(
    "default", max_examples=25, deadline=None, derandomize=True
)
hypothesis.settings.load_profile("default")


def brute_force_edges(points, radius):
    """All-pairs oracle for adjacency, honoring the torus metric."""
    c = points.coordinates
    n = len(c)
    region = points.region
    dx = np.abs(c[:, None, 0] - c[None, :, 0])
    dy = np.abs(c[:, None, 1] - c[None, :, 1])
    if region.boundary == "torus":
        dx = np.minimum(dx, region.width - dx)
        dy = np.minimum(dy, region.height - dy)
    d2 = dx * dx + dy * dy
    return {
        (i, j) for i in range(n) for j in range(i + 1, n) if d2[i, j] <= radius * radius
    }


def bfs_component_sizes(graph, alive):
    """Reference component sizes via plain breadth-first search."""
    n = len(graph)
    seen = [False] * n
    sizes = []
    for s in range(n):
        if seen[s] or not alive[s]:
            continue
        queue = [s]
        seen[s] = True
        size = 0
        while queue:
            u = queue.pop()
            size += 1
            for v in graph.neighbors(u).tolist():
                if alive[v] and not seen[v]:
                    seen[v] = True
                    queue.append(v)
        sizes.append(size)
    return sorted(sizes)


@pytest.fixture(scope="session")
def medium_graph():
    pts = generate_uniform(500, Region(14.0, 14.0), seed=99)
    return build_graph(pts, 1.0)
