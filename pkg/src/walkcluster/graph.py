"""Undirected graph container, planted-partition (SBM) generation, file I/O."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class Graph:
    """Simple undirected graph over dense node ids 0..n-1.

    Adjacency is stored CSR-style (indptr/indices) with each row sorted,
    which keeps neighbor lookups cheap inside walk loops. Instances are
    immutable after construction and safe to share across threads.
    """

    __slots__ = ("n", "indptr", "indices")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices

    @classmethod
    def from_edges(cls, n: int, edges: np.ndarray, validate: bool = True) -> "Graph":
        """Build a graph from an (m, 2) array of undirected edges.

        Edges may appear in either orientation but each unordered pair at
        most once. Raises ValueError on self-loops, duplicates, or ids
        outside 0..n-1.
        """
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if validate and edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("edge endpoint out of range 0..n-1")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loops are not allowed")
            norm = np.sort(edges, axis=1)
            keys = norm[:, 0] * n + norm[:, 1]
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate edges are not allowed")
        if edges.size:
            both = np.concatenate([edges, edges[:, ::-1]])
            order = np.lexsort((both[:, 1], both[:, 0]))
            both = both[order]
            indices = np.ascontiguousarray(both[:, 1])
            counts = np.bincount(both[:, 0], minlength=n)
        else:
            indices = np.empty(0, dtype=np.int64)
            counts = np.zeros(n, dtype=np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(n, indptr, indices)

    @property
    def m(self) -> int:
        """Number of undirected edges."""
        return int(self.indices.size // 2)

    @property
    def adjacency(self) -> list[np.ndarray]:
        """Per-node sorted neighbor arrays (views into shared storage)."""
        return [self.neighbors(u) for u in range(self.n)]

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degree(self, u: int) -> int:
        if not 0 <= u < self.n:
            raise IndexError(f"node id {u} out of range for graph with n={self.n}")
        return int(self.indptr[u + 1] - self.indptr[u])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def volume(self) -> int:
        """Sum of all degrees (= 2m)."""
        return int(self.indices.size)

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return i < row.size and row[i] == v

    def edges(self) -> np.ndarray:
        """All undirected edges as an (m, 2) array with u < v, sorted."""
        us = np.repeat(np.arange(self.n), np.diff(self.indptr))
        mask = us < self.indices
        return np.column_stack([us[mask], self.indices[mask]])

    def min_degree(self) -> int:
        return int(self.degrees().min()) if self.n else 0

    def connected_components(self) -> list[set[int]]:
        """Partition of the node set into maximal connected sets.

        Components are ordered by their smallest node id.
        """
        seen = np.zeros(self.n, dtype=bool)
        components = []
        for root in range(self.n):
            if seen[root]:
                continue
            seen[root] = True
            stack = [root]
            comp = {root}
            while stack:
                u = stack.pop()
                for v in self.neighbors(u):
                    v = int(v)
                    if not seen[v]:
                        seen[v] = True
                        comp.add(v)
                        stack.append(v)
            components.append(comp)
        return components

    def subgraph(self, nodes: set[int]) -> tuple["Graph", np.ndarray]:
        """Induced subgraph on ``nodes``; returns it plus old ids in new order."""
        keep = np.array(sorted(nodes), dtype=np.int64)
        remap = -np.ones(self.n, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        e = self.edges()
        mask = (remap[e[:, 0]] >= 0) & (remap[e[:, 1]] >= 0)
        sub_edges = remap[e[mask]]
        return Graph.from_edges(keep.size, sub_edges, validate=False), keep

    def __repr__(self) -> str:  # pragma: no cover
        return f"Graph(n={self.n}, m={self.m})"


def degree(g: Graph, u: int) -> int:
    return g.degree(u)


def volume(g: Graph) -> int:
    return g.volume()


def connected_components(g: Graph) -> list[set[int]]:
    return g.connected_components()


@dataclass(frozen=True)
class SbmParams:
    """Planted-partition model parameters.

    ``n`` nodes are assigned independently and uniformly to one of ``k``
    clusters; an intra-cluster pair is joined with probability c/n, an
    inter-cluster pair with probability c*(1-separation)/n. ``separation``
    of 1 yields disjoint clusters, 0 erases the cluster structure.
    """

    n: int
    k: int
    c: float
    separation: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.c <= 0:
            raise ValueError("c must be positive")
        if not 0.0 <= self.separation <= 1.0:
            raise ValueError("separation must lie in [0, 1]")
        if self.intra_probability > 1.0 or self.inter_probability > 1.0:
            raise ValueError("c/n must not exceed 1 (invalid edge probability)")

    @property
    def intra_probability(self) -> float:
        return self.c / self.n

    @property
    def inter_probability(self) -> float:
        return self.c * (1.0 - self.separation) / self.n


def _sample_block_pairs(rng: np.random.Generator, total: int, p: float) -> np.ndarray:
    """Indices of successes in ``total`` independent Bernoulli(p) trials.

    Uses geometric gap skipping, which reproduces the i.i.d. Bernoulli
    process exactly while doing O(successes) work.
    """
    if p <= 0.0 or total == 0:
        return np.empty(0, dtype=np.int64)
    hits = []
    pos = -1
    while True:
        pos += int(rng.geometric(p))
        if pos >= total:
            break
        hits.append(pos)
    return np.array(hits, dtype=np.int64)


def _triangle_pair(s: int, t: int) -> tuple[int, int]:
    """t-th pair (p, q), p < q, in row-major order over a size-s triangle."""
    r = s * (s - 1) // 2 - 1 - t
    j = (1 + math.isqrt(8 * r + 1)) // 2
    p = s - 1 - j
    q = s - 1 - (r - j * (j - 1) // 2)
    return p, q


def generate_sbm(params: SbmParams) -> tuple[Graph, np.ndarray]:
    """Sample a planted-partition graph and its ground-truth labels.

    Every unordered node pair is an independent Bernoulli draw (intra- or
    inter-cluster probability as appropriate). Deterministic for a fixed
    seed. Isolated nodes are kept.
    """
    rng = np.random.default_rng(params.seed)
    labels = rng.integers(0, params.k, size=params.n)
    members = [np.flatnonzero(labels == c) for c in range(params.k)]

    edge_chunks = []
    for i in range(params.k):
        for j in range(i, params.k):
            if i == j:
                nodes = members[i]
                s = nodes.size
                hits = _sample_block_pairs(rng, s * (s - 1) // 2,
                                           params.intra_probability)
                if hits.size:
                    pairs = np.array([_triangle_pair(s, int(t)) for t in hits])
                    edge_chunks.append(np.column_stack([nodes[pairs[:, 0]],
                                                        nodes[pairs[:, 1]]]))
            else:
                left, right = members[i], members[j]
                hits = _sample_block_pairs(rng, left.size * right.size,
                                           params.inter_probability)
                if hits.size:
                    u = left[hits // right.size]
                    v = right[hits % right.size]
                    edge_chunks.append(np.column_stack([np.minimum(u, v),
                                                        np.maximum(u, v)]))
    if edge_chunks:
        edges = np.concatenate(edge_chunks)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return Graph.from_edges(params.n, edges, validate=False), labels


def random_regular(n: int, d: int, seed: int = 0, max_tries: int = 100_000) -> Graph:
    """Random d-regular simple graph via the pairing model.

    Pairings with self-loops or duplicate edges are rejected and redrawn,
    so the result is uniform over simple pairings. Requires n*d even and
    d < n.
    """
    if d >= n:
        raise ValueError("need d < n for a simple d-regular graph")
    if (n * d) % 2 != 0:
        raise ValueError("n*d must be even")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        perm = rng.permutation(stubs)
        u, v = perm[0::2], perm[1::2]
        if np.any(u == v):
            continue
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        keys = lo * n + hi
        if np.unique(keys).size != keys.size:
            continue
        return Graph.from_edges(n, np.column_stack([lo, hi]), validate=False)
    raise RuntimeError(f"failed to draw a simple {d}-regular pairing "
                       f"after {max_tries} tries")


def write_edge_list(g: Graph, path) -> None:
    """Write the `n m` header followed by one `u v` line per edge (u < v)."""
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def read_edge_list(path) -> Graph:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("edge list must start with an 'n m' header line")
        n, m = int(header[0]), int(header[1])
        edges = np.loadtxt(fh, dtype=np.int64, ndmin=2) if m else np.empty((0, 2), np.int64)
    if edges.shape != (m, 2):
        raise ValueError(f"expected {m} edges, found array of shape {edges.shape}")
    if m and np.any(edges[:, 0] >= edges[:, 1]):
        raise ValueError("edge list rows must satisfy u < v")
    return Graph.from_edges(n, edges)


def write_labels(labels: np.ndarray, path) -> None:
    np.savetxt(path, np.asarray(labels, dtype=np.int64), fmt="%d")


def read_labels(path) -> np.ndarray:
    labels = np.loadtxt(path, dtype=np.int64, ndmin=1)
    return labels
