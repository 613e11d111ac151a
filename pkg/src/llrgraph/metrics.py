"""Clustering and classification quality measures."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import spmatrix


def contingency_table(pred: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Counts matrix, predicted clusters as rows and true classes as columns."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError(f"label vectors must be 1-D with equal length, got {pred.shape} and {truth.shape}")
    _, pi = np.unique(pred, return_inverse=True)
    _, ti = np.unique(truth, return_inverse=True)
    counts = np.zeros((pi.max() + 1, ti.max() + 1), dtype=np.int64)
    np.add.at(counts, (pi, ti), 1)
    return counts


def hungarian(cost: np.ndarray) -> np.ndarray:
    """Minimum-cost injective row-to-column assignment.

    Returns an array of length n_rows with the assigned column per row, or
    -1 for rows left unassigned when the matrix has more rows than columns.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.size == 0:
        raise ValueError(f"cost must be a nonempty 2-D matrix, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix contains non-finite entries")
    row_ind, col_ind = linear_sum_assignment(cost)
    assignment = np.full(cost.shape[0], -1, dtype=np.int64)
    assignment[row_ind] = col_ind
    return assignment


def clustering_accuracy(pred: np.ndarray, truth: np.ndarray) -> float:
    """Best label-matched agreement fraction over injective cluster-to-class maps."""
    counts = contingency_table(pred, truth)
    assignment = hungarian(-counts.astype(float))
    matched = sum(
        int(counts[r, c]) for r, c in enumerate(assignment) if c >= 0
    )
    return matched / int(counts.sum())


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def nmi(pred: np.ndarray, truth: np.ndarray) -> float:
    """Normalized mutual information with square-root normalization.

    Natural-log entropies from the contingency table; 0 log 0 = 0. If either
    marginal entropy is zero the value is 1 when the two partitions are
    identical as set partitions and 0 otherwise.
    """
    counts = contingency_table(pred, truth)
    n = counts.sum()
    pij = counts / n
    pr = pij.sum(axis=1)
    pc = pij.sum(axis=0)
    h_pred = _entropy(pr)
    h_truth = _entropy(pc)
    if h_pred == 0.0 or h_truth == 0.0:
        same = np.all((counts > 0).sum(axis=1) <= 1) and np.all((counts > 0).sum(axis=0) <= 1)
        return 1.0 if same else 0.0
    nz = pij > 0
    mi = float((pij[nz] * np.log(pij[nz] / (np.outer(pr, pc)[nz]))).sum())
    value = mi / np.sqrt(h_pred * h_truth)
    return float(min(max(value, 0.0), 1.0))


def classification_accuracy(pred: np.ndarray, truth: np.ndarray) -> float:
    """Exact-match fraction; labels are compared directly."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError(f"label vectors must be 1-D with equal length, got {pred.shape} and {truth.shape}")
    return float(np.mean(pred == truth))


def intra_class_edge_mass(W: spmatrix, labels: np.ndarray) -> float:
    """Fraction of total edge weight connecting same-class vertex pairs."""
    labels = np.asarray(labels)
    if W.shape[0] != labels.shape[0]:
        raise ValueError("label length must match graph size")
    coo = W.tocoo()
    total = float(coo.data.sum())
    if total <= 0:
        raise ValueError("graph has no edge mass")
    same = float(coo.data[labels[coo.row] == labels[coo.col]].sum())
    return same / total
