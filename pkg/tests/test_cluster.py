import numpy as np
import pytest

from walkcluster import EmbeddingMatrix, KmeansParams, ccr, \
    cluster_embedding, kmeans
from walkcluster.cluster import _lloyd


def two_blobs(rng, separation=100.0, size=50):
    a = rng.normal(0.0, 1.0, size=(size, 2))
    b = rng.normal(separation, 1.0, size=(size, 2))
    points = np.vstack([a, b])
    labels = np.array([0] * size + [1] * size)
    return points, labels


def test_separated_blobs_recovered_exactly():
    # oracle: separation >> variance, so optimal 2-means splits the blobs
    points, truth = two_blobs(np.random.default_rng(0))
    result = kmeans(points, KmeansParams(2, seed=1))
    assert ccr(truth, result.labels)[0] == 1.0


def test_k_equal_one():
    points = np.random.default_rng(2).normal(size=(30, 3))
    result = kmeans(points, KmeansParams(1, seed=0))
    assert np.all(result.labels == 0)
    assert np.allclose(result.centroids[0], points.mean(axis=0))


def test_k_distinct_values_gives_zero_sse():
    values = np.array([[0.0, 0.0], [5.0, 5.0], [9.0, -1.0]])
    points = np.repeat(values, 4, axis=0)
    result = kmeans(points, KmeansParams(3, seed=3))
    assert result.sse == pytest.approx(0.0, abs=1e-20)
    # points sharing a value share a cluster, distinct values differ
    groups = [result.labels[i * 4:(i + 1) * 4] for i in range(3)]
    assert all(len(set(g)) == 1 for g in groups)
    assert len({g[0] for g in groups}) == 3


def test_fewer_points_than_k_rejected():
    with pytest.raises(ValueError):
        kmeans(np.zeros((2, 2)), KmeansParams(3))


def test_identical_points_degenerate_but_valid():
    points = np.ones((10, 2))
    result = kmeans(points, KmeansParams(3, seed=0))
    assert result.sse == pytest.approx(0.0)
    assert result.labels.shape == (10,)


def test_best_of_restarts_and_determinism():
    rng = np.random.default_rng(5)
    points = rng.normal(size=(80, 4))
    params = KmeansParams(5, restarts=8, seed=11)
    a = kmeans(points, params)
    b = kmeans(points, params)
    assert a.sse == pytest.approx(min(a.restart_sses), abs=1e-12)
    assert a.restart_sses.shape == (8,)
    assert np.array_equal(a.labels, b.labels)
    assert np.array_equal(a.centroids, b.centroids)


def test_empty_cluster_repair():
    # two tight blobs with a centroid started far away: the stray centroid
    # captures nothing on the first pass and must be reseeded
    rng = np.random.default_rng(6)
    points, _ = two_blobs(rng, separation=10.0, size=20)
    init = np.array([[0.0, 0.0], [10.0, 10.0], [1e6, 1e6]])
    labels, centroids, sse = _lloyd(points, init, max_iters=50, tol=1e-8)
    assert np.isfinite(sse)
    assert len(set(labels.tolist())) == 3


def test_lloyd_iterations_do_not_increase_sse():
    # run on data prone to empty clusters; the in-loop assertion enforces
    # monotonicity on every iteration
    rng = np.random.default_rng(7)
    points = np.vstack([rng.normal(0, 0.1, (40, 3)),
                        rng.normal(4, 0.1, (40, 3))])
    kmeans(points, KmeansParams(7, restarts=6, seed=2))


def test_cluster_embedding_assigns_untrained_rows():
    vectors = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [5.1, 5.0],
                        [4.9, 4.8], [0.05, 0.02]])
    trained = np.array([True, True, True, True, False, False])
    emb = EmbeddingMatrix(vectors, trained)
    result = cluster_embedding(emb, KmeansParams(2, seed=0))
    assert result.labels[4] == result.labels[2]  # near the (5, 5) centroid
    assert result.labels[5] == result.labels[0]  # near the origin centroid
    assert result.labels.shape == (6,)
