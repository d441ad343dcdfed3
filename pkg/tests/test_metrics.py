import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from walkcluster import ccr, confusion_matrix, nmi, score


def brute_force_ccr(true_labels, pred_labels) -> float:
    """Exhaustive search over all one-to-one label assignments."""
    k = int(max(max(true_labels), max(pred_labels))) + 1
    best = 0
    for perm in itertools.permutations(range(k)):
        matched = sum(1 for t, p in zip(true_labels, pred_labels)
                      if perm[p] == t)
        best = max(best, matched)
    return best / len(true_labels)


def entropy_bits(labels) -> float:
    n = len(labels)
    return -sum((c / n) * math.log2(c / n) for c in Counter(labels).values())


def test_ccr_swapped_labels_is_perfect():
    rate, assignment = ccr([0, 0, 1, 1], [1, 1, 0, 0])
    assert rate == 1.0
    assert assignment[1] == 0 and assignment[0] == 1


def test_ccr_half_right():
    # oracle: both assignments of 2 labels match exactly 2 of 4
    true, pred = [0, 0, 1, 1], [0, 1, 0, 1]
    assert brute_force_ccr(true, pred) == 0.5
    assert ccr(true, pred)[0] == 0.5


def test_ccr_three_clusters():
    true, pred = [0, 0, 0, 1, 1, 2], [0, 0, 1, 1, 1, 2]
    assert brute_force_ccr(true, pred) == pytest.approx(5 / 6)
    rate, assignment = ccr(true, pred)
    assert rate == pytest.approx(5 / 6)
    assert np.array_equal(assignment, [0, 1, 2])


def test_ccr_matches_bruteforce_on_random_pairs():
    rng = np.random.default_rng(0)
    for _ in range(150):
        k = int(rng.integers(2, 5))
        n = int(rng.integers(k, 30))
        true = rng.integers(0, k, n)
        pred = rng.integers(0, k, n)
        assert ccr(true, pred)[0] == pytest.approx(brute_force_ccr(true, pred))


def test_ccr_with_unequal_label_counts():
    # predicted uses 3 labels, truth only 2: confusion is padded square
    true, pred = [0, 0, 1, 1], [0, 1, 2, 2]
    assert ccr(true, pred)[0] == pytest.approx(brute_force_ccr(true, pred))


def test_ccr_rejects_length_mismatch():
    with pytest.raises(ValueError):
        ccr([0, 1], [0, 1, 1])


def test_nmi_identical_labelings():
    assert nmi([0, 1, 0, 1, 2], [0, 1, 0, 1, 2]) == pytest.approx(1.0)


def test_nmi_independent_labelings():
    # joint uniform over 4 cells: I = 1 + 1 - 2 = 0 bits
    assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(0.0, abs=1e-12)


def test_nmi_hand_computed_value():
    true, pred = [0, 0, 1, 1], [0, 0, 0, 1]
    h_true = entropy_bits(true)
    h_pred = entropy_bits(pred)
    h_joint = entropy_bits(list(zip(true, pred)))
    oracle = (h_true + h_pred - h_joint) / math.sqrt(h_true * h_pred)
    assert oracle == pytest.approx(0.3456, abs=1e-3)
    assert nmi(true, pred) == pytest.approx(oracle, abs=1e-12)
    assert nmi(true, pred) == pytest.approx(0.3456, abs=1e-3)


def test_nmi_zero_entropy_conventions():
    assert nmi([0, 0, 0], [1, 1, 1]) == 1.0  # identical partitions
    assert nmi([0, 0, 0], [0, 0, 1]) == 0.0
    assert nmi([0, 1, 0], [2, 2, 2]) == 0.0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)),
                min_size=2, max_size=40))
def test_nmi_symmetry_and_bounds(pairs):
    x = np.array([a for a, _ in pairs])
    y = np.array([b for _, b in pairs])
    forward, backward = nmi(x, y), nmi(y, x)
    assert forward == pytest.approx(backward, abs=1e-12)
    assert -1e-12 <= forward <= 1 + 1e-12
    rate, _ = ccr(x, y)
    k = int(max(x.max(), y.max())) + 1
    assert rate >= 1 / k - 1e-12


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)),
                min_size=2, max_size=30),
       st.permutations(range(3)), st.permutations(range(3)))
def test_nmi_relabeling_invariance(pairs, perm_x, perm_y):
    x = np.array([a for a, _ in pairs])
    y = np.array([b for _, b in pairs])
    x2 = np.array([perm_x[v] for v in x])
    y2 = np.array([perm_y[v] for v in y])
    assert nmi(x2, y2) == pytest.approx(nmi(x, y), abs=1e-12)


def test_ccr_at_least_half_for_two_clusters():
    rng = np.random.default_rng(1)
    for _ in range(50):
        true = rng.integers(0, 2, 20)
        pred = rng.integers(0, 2, 20)
        assert ccr(true, pred)[0] >= 0.5


def test_score_report_consistency():
    true = np.array([0, 0, 1, 1, 1, 0])
    pred = np.array([1, 1, 0, 0, 0, 0])
    report = score(true, pred)
    k = report.confusion.shape[0]
    permuted_trace = sum(report.confusion[report.assignment[p], p]
                         for p in range(k))
    assert report.ccr == pytest.approx(permuted_trace / len(true))
    assert "," in report.csv_row()


def test_score_with_mask():
    true = np.array([0, 1, 0, 1])
    pred = np.array([0, 1, 1, 1])
    masked = score(true, pred, mask=np.array([True, True, False, True]))
    assert masked.ccr == 1.0


def test_confusion_matrix_counts():
    counts = confusion_matrix([0, 0, 1], [0, 1, 1])
    assert counts.tolist() == [[1, 1], [0, 1]]
