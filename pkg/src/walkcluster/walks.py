"""Random-walk corpus generation and co-occurrence counting.

Three step rules are supported: the simple walk (uniform over neighbors),
the non-backtracking walk (uniform over neighbors except the previous
node, terminating when no choice remains), and the begrudgingly
backtracking walk (non-backtracking, but reusing the arrival edge when it
is the only option instead of terminating).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graph import Graph


class WalkPolicy(Enum):
    SIMPLE = "simple"
    NON_BACKTRACKING = "non_backtracking"
    BEGRUDGING = "begrudging"


@dataclass(frozen=True)
class WalkParams:
    """Corpus parameters: ``walks_per_node`` walks of ``walk_length`` steps."""

    walks_per_node: int
    walk_length: int
    policy: WalkPolicy = WalkPolicy.BEGRUDGING
    seed: int = 0

    def __post_init__(self):
        if self.walks_per_node < 1:
            raise ValueError("walks_per_node must be >= 1")
        if self.walk_length < 1:
            raise ValueError("walk_length must be >= 1")


def step_simple(g: Graph, current: int, rng: np.random.Generator) -> int | None:
    """Uniform neighbor of ``current``; None when the node has no edges."""
    row = g.neighbors(current)
    if row.size == 0:
        return None
    return int(row[rng.integers(row.size)])


def step_nonbacktracking(g: Graph, current: int, previous: int | None,
                         rng: np.random.Generator) -> int | None:
    """Uniform neighbor excluding ``previous``; None when none remains.

    Exclusion is done by rejection: redraw while the drawn neighbor equals
    ``previous``. This is exact and O(1) expected for degree >= 2.
    """
    row = g.neighbors(current)
    if row.size == 0:
        return None
    if previous is None:
        return int(row[rng.integers(row.size)])
    if row.size == 1:
        only = int(row[0])
        return None if only == previous else only
    while True:
        pick = int(row[rng.integers(row.size)])
        if pick != previous:
            return pick


def step_begrudging(g: Graph, current: int, previous: int | None,
                    rng: np.random.Generator) -> int | None:
    """Like the non-backtracking step, but backtracks when forced to."""
    row = g.neighbors(current)
    if row.size == 0:
        return None
    if previous is None:
        return int(row[rng.integers(row.size)])
    if row.size == 1:
        return int(row[0])
    while True:
        pick = int(row[rng.integers(row.size)])
        if pick != previous:
            return pick


def _walk_rng(seed: int, node: int, t: int) -> np.random.Generator:
    # Independent stream per (seed, node, t): reproducible regardless of
    # generation order, so walks can be parallelized safely.
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=seed, spawn_key=(node, t))))


def generate_walk(g: Graph, start: int, length: int, policy: WalkPolicy,
                  rng: np.random.Generator) -> list[int]:
    """One walk of up to ``length`` steps; truncated when the rule ends it."""
    walk = [start]
    previous: int | None = None
    current = start
    for _ in range(length):
        if policy is WalkPolicy.SIMPLE:
            nxt = step_simple(g, current, rng)
        elif policy is WalkPolicy.NON_BACKTRACKING:
            nxt = step_nonbacktracking(g, current, previous, rng)
        else:
            nxt = step_begrudging(g, current, previous, rng)
        if nxt is None:
            break
        walk.append(nxt)
        previous, current = current, nxt
    return walk


@dataclass
class WalkCorpus:
    """Ordered collection of node-id sentences produced by walks."""

    sentences: list[list[int]]

    def __len__(self) -> int:
        return len(self.sentences)

    def node_counts(self, n: int) -> np.ndarray:
        counts = np.zeros(n, dtype=np.int64)
        for sentence in self.sentences:
            for node in sentence:
                counts[node] += 1
        return counts

    def max_node(self) -> int:
        return max((max(s) for s in self.sentences if s), default=-1)


def build_corpus(g: Graph, params: WalkParams) -> WalkCorpus:
    """Run ``walks_per_node`` walks from every node of positive degree.

    Degree-0 nodes start no walks and, being unreachable, never appear in
    any sentence. Sentences are ordered by (start node, walk index).
    """
    sentences = []
    for node in range(g.n):
        if g.degree(node) == 0:
            continue
        for t in range(params.walks_per_node):
            rng = _walk_rng(params.seed, node, t)
            sentences.append(generate_walk(g, node, params.walk_length,
                                           params.policy, rng))
    return WalkCorpus(sentences)


@dataclass
class CooccurrenceMatrix:
    """Sparse symmetric co-occurrence counts within a fixed window."""

    counts: dict[tuple[int, int], int]
    window: int

    def count(self, i: int, j: int) -> int:
        return self.counts.get((i, j), 0)


def build_cooccurrence(corpus: WalkCorpus, window: int) -> CooccurrenceMatrix:
    """Count ordered position pairs (p, q), p != q, |p - q| <= window."""
    if window < 1:
        raise ValueError("window must be >= 1")
    counts: dict[tuple[int, int], int] = {}
    for sentence in corpus.sentences:
        length = len(sentence)
        for p in range(length):
            i = sentence[p]
            for q in range(max(0, p - window), min(length, p + window + 1)):
                if q == p:
                    continue
                key = (i, sentence[q])
                counts[key] = counts.get(key, 0) + 1
    return CooccurrenceMatrix(counts, window)


def write_corpus(corpus: WalkCorpus, path) -> None:
    """One sentence per line, space-separated node ids."""
    with open(path, "w") as fh:
        for sentence in corpus.sentences:
            fh.write(" ".join(map(str, sentence)) + "\n")


def read_corpus(path) -> WalkCorpus:
    sentences = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                sentences.append([int(tok) for tok in line.split()])
    return WalkCorpus(sentences)
