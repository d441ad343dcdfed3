import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from walkcluster import Graph, SbmParams, WalkCorpus, WalkParams, WalkPolicy, \
    build_cooccurrence, build_corpus, generate_sbm, random_regular, \
    step_begrudging, step_nonbacktracking, step_simple
from walkcluster.walks import read_corpus, write_corpus

from conftest import cycle_graph, path_graph, star_graph


def test_step_simple_forced_and_dangling():
    g = Graph.from_edges(2, [[0, 1]])
    rng = np.random.default_rng(0)
    assert all(step_simple(g, 0, rng) == 1 for _ in range(10))
    iso = Graph.from_edges(2, np.empty((0, 2)))
    assert step_simple(iso, 0, rng) is None


def test_step_simple_uniform_on_star():
    # oracle: uniform over 4 leaves; each frequency within 3 sigma of 1/4
    g = star_graph(4)
    rng = np.random.default_rng(123)
    draws = 100_000
    counts = np.zeros(5)
    for _ in range(draws):
        counts[step_simple(g, 0, rng)] += 1
    freqs = counts[1:] / draws
    sigma = math.sqrt(0.25 * 0.75 / draws)
    assert np.all(np.abs(freqs - 0.25) < 3 * sigma)


def test_step_nonbacktracking_cases():
    rng = np.random.default_rng(1)
    path = path_graph(2)
    assert step_nonbacktracking(path, 1, 0, rng) is None
    tri = Graph.from_edges(3, [[0, 1], [0, 2], [1, 2]])
    assert all(step_nonbacktracking(tri, 1, 0, rng) == 2 for _ in range(10))
    star = star_graph(4)
    seen = {step_nonbacktracking(star, 0, None, rng) for _ in range(200)}
    assert seen == {1, 2, 3, 4}


def test_step_begrudging_cases():
    rng = np.random.default_rng(2)
    path = path_graph(2)
    assert step_begrudging(path, 1, 0, rng) == 0
    tri = Graph.from_edges(3, [[0, 1], [0, 2], [1, 2]])
    assert all(step_begrudging(tri, 1, 0, rng) == 2 for _ in range(10))


def test_begrudging_walk_on_single_edge_alternates():
    g = Graph.from_edges(2, [[0, 1]])
    corpus = build_corpus(g, WalkParams(1, 5, WalkPolicy.BEGRUDGING, seed=0))
    assert corpus.sentences[0] == [0, 1, 0, 1, 0, 1]


def test_corpus_on_single_edge():
    g = Graph.from_edges(2, [[0, 1]])
    corpus = build_corpus(g, WalkParams(2, 3, WalkPolicy.BEGRUDGING, seed=0))
    assert len(corpus) == 4
    assert corpus.sentences == [[0, 1, 0, 1], [0, 1, 0, 1],
                                [1, 0, 1, 0], [1, 0, 1, 0]]


def test_isolated_node_never_appears():
    g = Graph.from_edges(4, [[0, 1], [0, 2], [1, 2]])
    corpus = build_corpus(g, WalkParams(5, 8, WalkPolicy.SIMPLE, seed=9))
    assert all(3 not in sentence for sentence in corpus.sentences)
    assert len(corpus) == 15  # only the three connected nodes start walks


def test_corpus_counting_on_connected_graph():
    g = cycle_graph(100)
    corpus = build_corpus(g, WalkParams(10, 5, WalkPolicy.SIMPLE, seed=4))
    assert len(corpus) == 1000
    assert all(len(s) == 6 for s in corpus.sentences)


def test_corpus_deterministic():
    g, _ = generate_sbm(SbmParams(80, 2, 5.0, 0.8, seed=1))
    a = build_corpus(g, WalkParams(3, 7, WalkPolicy.BEGRUDGING, seed=5))
    b = build_corpus(g, WalkParams(3, 7, WalkPolicy.BEGRUDGING, seed=5))
    assert a.sentences == b.sentences


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 1000),
       policy=st.sampled_from(list(WalkPolicy)),
       r=st.integers(1, 3), length=st.integers(1, 12))
def test_corpus_sentences_follow_edges(seed, policy, r, length):
    g, _ = generate_sbm(SbmParams(40, 2, 3.0, 0.6, seed=seed))
    corpus = build_corpus(g, WalkParams(r, length, policy, seed=seed))
    degs = g.degrees()
    for sentence in corpus.sentences:
        assert 2 <= len(sentence) <= length + 1
        for a, b in zip(sentence, sentence[1:]):
            assert g.has_edge(a, b)
        if policy is not WalkPolicy.SIMPLE:
            for x, y, z in zip(sentence, sentence[1:], sentence[2:]):
                if x == z:
                    assert policy is WalkPolicy.BEGRUDGING
                    assert degs[y] == 1


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 1000), length=st.integers(1, 15))
def test_begrudging_walks_never_truncate(seed, length):
    g = random_regular(20, 3, seed=seed)
    extra = Graph.from_edges(22, np.vstack([g.edges(), [[0, 20], [1, 21]]]))
    corpus = build_corpus(extra, WalkParams(2, length,
                                            WalkPolicy.BEGRUDGING, seed=seed))
    assert all(len(s) == length + 1 for s in corpus.sentences)


def test_nonbacktracking_walks_truncate_at_pendants():
    g = path_graph(3)
    corpus = build_corpus(g, WalkParams(1, 10, WalkPolicy.NON_BACKTRACKING,
                                        seed=0))
    # every walk dies at an endpoint; truncated sentences are retained
    assert sorted(len(s) for s in corpus.sentences) == [2, 3, 3]


def test_simple_walk_visits_match_stationary_distribution():
    # oracle: stationary mass of node v is deg(v)/vol(G)
    g = random_regular(20, 3, seed=3)
    non_edge = next([0, v] for v in range(1, 20) if not g.has_edge(0, v))
    g = Graph.from_edges(20, np.vstack([g.edges(), non_edge]))  # break regularity
    rng = np.random.default_rng(7)
    steps = 200_000
    counts = np.zeros(g.n)
    current = 0
    for _ in range(steps):
        current = step_simple(g, current, rng)
        counts[current] += 1
    freqs = counts / steps
    target = g.degrees() / g.volume()
    assert np.abs(freqs - target).max() < 0.005


def test_cooccurrence_window_one():
    corpus = WalkCorpus([[0, 1, 2]])
    co = build_cooccurrence(corpus, 1)
    assert co.count(0, 1) == 1 and co.count(1, 0) == 1
    assert co.count(1, 2) == 1 and co.count(2, 1) == 1
    assert co.count(0, 2) == 0


def test_cooccurrence_window_two():
    co = build_cooccurrence(WalkCorpus([[0, 1, 2]]), 2)
    assert co.count(0, 2) == 1 and co.count(2, 0) == 1
    assert co.count(0, 1) == 1


def test_cooccurrence_matches_bruteforce():
    rng = np.random.default_rng(11)
    sentences = [rng.integers(0, 6, size=rng.integers(1, 9)).tolist()
                 for _ in range(12)]
    window = 3
    co = build_cooccurrence(WalkCorpus(sentences), window)
    brute: dict = {}
    for s in sentences:
        for p in range(len(s)):
            for q in range(len(s)):
                if p != q and abs(p - q) <= window:
                    brute[(s[p], s[q])] = brute.get((s[p], s[q]), 0) + 1
    assert co.counts == brute
    # symmetric when accumulated in both directions
    for (i, j), v in co.counts.items():
        assert co.count(j, i) == v


def test_cooccurrence_rejects_bad_window():
    with pytest.raises(ValueError):
        build_cooccurrence(WalkCorpus([[0, 1]]), 0)


def test_corpus_roundtrip(tmp_path):
    g, _ = generate_sbm(SbmParams(30, 2, 4.0, 0.9, seed=8))
    corpus = build_corpus(g, WalkParams(2, 4, WalkPolicy.SIMPLE, seed=1))
    path = tmp_path / "corpus.txt"
    write_corpus(corpus, path)
    assert read_corpus(path).sentences == corpus.sentences
