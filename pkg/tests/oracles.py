"""Independent reference implementations used only to check the library.

Everything here is deliberately brute-force and kept free of the code
paths under test.
"""
from __future__ import annotations

import numpy as np

from hopmap.graph import Graph

INF = np.iinfo(np.int64).max // 4


def floyd_warshall_hops(g: Graph) -> np.ndarray:
    """All-pairs hop counts by Floyd-Warshall; -1 where unreachable."""
    d = np.full((g.n, g.n), INF, dtype=np.int64)
    np.fill_diagonal(d, 0)
    for i, j in g.edges:
        d[i, j] = 1
        d[j, i] = 1
    for k in range(g.n):
        d = np.minimum(d, d[:, k, None] + d[None, k, :])
    d[d >= INF] = -1
    return d


def triangle_violations(hops: np.ndarray) -> int:
    """Count triples (i, j, k), all finite, with h_ij > h_ik + h_kj."""
    h = hops.astype(np.int64)
    finite = h >= 0
    bad = 0
    for k in range(h.shape[0]):
        ok = finite & finite[:, k, None] & finite[None, k, :]
        bad += int(np.sum(ok & (h > h[:, k, None] + h[None, k, :])))
    return bad


def path_graph(n: int) -> Graph:
    return Graph.from_edge_list(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edge_list(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edge_list(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def grid_graph(rows: int, cols: int) -> Graph:
    def idx(r, c):
        return r * cols + c

    pairs = []
    for r in range(rows):
        for c in range(cols):
            if r + 1 < rows:
                pairs.append((idx(r, c), idx(r + 1, c)))
            if c + 1 < cols:
                pairs.append((idx(r, c), idx(r, c + 1)))
    return Graph.from_edge_list(rows * cols, pairs)


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edge_list(10, outer + spokes + inner)


def cartesian_product(g1: Graph, g2: Graph) -> Graph:
    """Nodes (a, b) flattened as a * g2.n + b; edges on one factor at a time."""
    pairs = []
    for a in range(g1.n):
        for i, j in g2.edges:
            pairs.append((a * g2.n + i, a * g2.n + j))
    for b in range(g2.n):
        for i, j in g1.edges:
            pairs.append((i * g2.n + b, j * g2.n + b))
    return Graph.from_edge_list(g1.n * g2.n, pairs)


def random_connected_graph(rng: np.random.Generator, n: int, extra_edge_frac: float = 0.5) -> Graph:
    """Random spanning tree plus extra random edges; connected by construction."""
    pairs = []
    order = rng.permutation(n)
    for k in range(1, n):
        attach = order[rng.integers(0, k)]
        pairs.append((int(order[k]), int(attach)))
    n_extra = int(extra_edge_frac * n)
    for _ in range(n_extra):
        i, j = rng.integers(0, n, size=2)
        if i != j:
            pairs.append((int(i), int(j)))
    return Graph.from_edge_list(n, pairs)


def random_graph_with_components(rng: np.random.Generator, sizes: list[int]) -> Graph:
    """Disjoint union of random connected graphs of the given sizes."""
    pairs = []
    offset = 0
    for size in sizes:
        sub = random_connected_graph(rng, size)
        pairs.extend((i + offset, j + offset) for i, j in sub.edges)
        offset += size
    return Graph.from_edge_list(offset, pairs)


def brute_betweenness(g: Graph) -> np.ndarray:
    """Betweenness by enumerating every shortest path (tiny graphs only)."""
    h = floyd_warshall_hops(g)
    adj = g.adjacency

    def all_shortest_paths(s, t):
        if h[s, t] < 0:
            return []
        paths = []
        stack = [(s, [s])]
        while stack:
            v, path = stack.pop()
            if v == t:
                paths.append(path)
                continue
            for w in adj[v]:
                if h[s, w] == len(path) and h[w, t] == h[s, t] - len(path):
                    stack.append((w, path + [w]))
        return paths

    cb = np.zeros(g.n)
    for s in range(g.n):
        for t in range(s + 1, g.n):
            paths = all_shortest_paths(s, t)
            if not paths:
                continue
            for path in paths:
                for v in path[1:-1]:
                    cb[v] += 1.0 / len(paths)
    return cb


def naive_partial_center(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Partial double centering of squared values via explicit loops."""
    n, m = values.shape
    sq = values * values
    col_mean = np.zeros(m)
    row_mean = np.zeros(n)
    total, count = 0.0, 0
    for j in range(m):
        obs = [sq[i, j] for i in range(n) if mask[i, j]]
        col_mean[j] = sum(obs) / len(obs)
    for i in range(n):
        obs = [sq[i, j] for j in range(m) if mask[i, j]]
        row_mean[i] = sum(obs) / len(obs)
        total += sum(obs)
        count += len(obs)
    grand = total / count
    out = np.zeros_like(values, dtype=float)
    for i in range(n):
        for j in range(m):
            if mask[i, j]:
                out[i, j] = -0.5 * (sq[i, j] - row_mean[i] - col_mean[j] + grand)
    return out
