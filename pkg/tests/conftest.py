import itertools

import numpy as np
import pytest

from walkcluster import Graph


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [[i, i + 1] for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    edges = [[i, (i + 1) % n] for i in range(n)]
    return Graph.from_edges(n, np.sort(np.array(edges), axis=1))


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, list(itertools.combinations(range(n), 2)))


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [[0, i + 1] for i in range(leaves)])


def disjoint_cliques(size: int, count: int = 2) -> Graph:
    edges = []
    for block in range(count):
        base = block * size
        edges += [(base + u, base + v)
                  for u, v in itertools.combinations(range(size), 2)]
    return Graph.from_edges(size * count, edges)


@pytest.fixture
def triangle() -> Graph:
    return complete_graph(3)
