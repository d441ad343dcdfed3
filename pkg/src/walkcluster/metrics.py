"""Clustering quality metrics: correct classification rate and NMI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass
class MetricsReport:
    ccr: float
    nmi: float
    assignment: np.ndarray
    confusion: np.ndarray

    def csv_row(self) -> str:
        return f"{self.ccr},{self.nmi}"


def confusion_matrix(true_labels: np.ndarray, pred_labels: np.ndarray,
                     k: int | None = None) -> np.ndarray:
    """Square count matrix C[t, p] = #nodes with true label t, predicted p.

    Padded square over max(K_true, K_pred) so the assignment below stays
    well-posed when the label sets differ in size.
    """
    true_labels = np.asarray(true_labels, dtype=np.int64)
    pred_labels = np.asarray(pred_labels, dtype=np.int64)
    if true_labels.shape != pred_labels.shape:
        raise ValueError("label vectors must have equal length")
    if true_labels.size and (true_labels.min() < 0 or pred_labels.min() < 0):
        raise ValueError("labels must be non-negative")
    if k is None:
        k = int(max(true_labels.max(initial=-1),
                    pred_labels.max(initial=-1))) + 1
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (true_labels, pred_labels), 1)
    return counts


def ccr(true_labels: np.ndarray, pred_labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Correct classification rate under the best one-to-one relabeling.

    Solves the linear sum assignment matching predicted clusters to true
    clusters exactly; returns (rate, assignment) where assignment[p] is
    the true label matched to predicted label p.
    """
    counts = confusion_matrix(true_labels, pred_labels)
    rows, cols = linear_sum_assignment(counts, maximize=True)
    matched = int(counts[rows, cols].sum())
    assignment = np.empty(counts.shape[0], dtype=np.int64)
    assignment[cols] = rows
    return matched / len(true_labels), assignment


def _entropy(probabilities: np.ndarray) -> float:
    p = probabilities[probabilities > 0]
    return float(-(p * np.log(p)).sum())


def _same_partition(a: np.ndarray, b: np.ndarray) -> bool:
    # identical as set partitions, i.e. equal up to relabeling
    seen: dict[tuple[int, int], None] = {}
    fa: dict[int, int] = {}
    fb: dict[int, int] = {}
    for x, y in zip(a.tolist(), b.tolist()):
        if fa.setdefault(x, y) != y or fb.setdefault(y, x) != x:
            return False
        seen[(x, y)] = None
    return True


def nmi(true_labels: np.ndarray, pred_labels: np.ndarray) -> float:
    """Mutual information normalized by the geometric mean of entropies.

    If either labeling has zero entropy the ratio is undefined; by
    convention the result is 1.0 when the two partitions coincide and 0.0
    otherwise.
    """
    true_labels = np.asarray(true_labels, dtype=np.int64)
    pred_labels = np.asarray(pred_labels, dtype=np.int64)
    if true_labels.shape != pred_labels.shape:
        raise ValueError("label vectors must have equal length")
    n = true_labels.size
    counts = confusion_matrix(true_labels, pred_labels)
    h_true = _entropy(counts.sum(axis=1) / n)
    h_pred = _entropy(counts.sum(axis=0) / n)
    if h_true == 0.0 or h_pred == 0.0:
        return 1.0 if _same_partition(true_labels, pred_labels) else 0.0
    h_joint = _entropy(counts.ravel() / n)
    information = max(0.0, h_true + h_pred - h_joint)
    return information / np.sqrt(h_true * h_pred)


def score(true_labels: np.ndarray, pred_labels: np.ndarray,
          mask: np.ndarray | None = None) -> MetricsReport:
    """CCR and NMI of a prediction, optionally restricted to ``mask``."""
    true_labels = np.asarray(true_labels, dtype=np.int64)
    pred_labels = np.asarray(pred_labels, dtype=np.int64)
    if mask is not None:
        true_labels = true_labels[mask]
        pred_labels = pred_labels[mask]
    rate, assignment = ccr(true_labels, pred_labels)
    return MetricsReport(rate, nmi(true_labels, pred_labels), assignment,
                         confusion_matrix(true_labels, pred_labels))
