"""Block diagonal reconstruction, spectral partitioning and quality metrics."""

from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.optimize

from .enhance import Type1Report
from .errors import EmptyGraph, LengthMismatch
from .matrix_core import EigenMode, SymmetricGraph, eig_smallest


def reconstruct_bd(W: np.ndarray, n_hat: Sequence[int]) -> np.ndarray:
    """Copy diagonal blocks of an ordered affinity, zero everything across."""
    W = np.asarray(W, dtype=float)
    if int(np.sum(n_hat)) != W.shape[0]:
        raise ValueError("block sizes must partition the matrix")
    out = np.zeros_like(W)
    edges = np.concatenate([[0], np.cumsum(n_hat)])
    for lo, hi in zip(edges[:-1], edges[1:]):
        out[lo:hi, lo:hi] = W[lo:hi, lo:hi]
    return out


def _kmeans_pp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[i] = X[rng.integers(n)]
        else:
            centers[i] = X[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((X - centers[i]) ** 2, axis=1))
    return centers


def kmeans(
    X: np.ndarray,
    k: int,
    seed: int = 0,
    restarts: int = 50,
    max_iter: int = 300,
    tol: float = 1e-9,
) -> tuple[np.ndarray, float]:
    """Lloyd iterations from k-means++ starts; best run by lowest inertia.

    Ties keep the earliest restart, so results are reproducible per seed.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        centers = _kmeans_pp_init(X, k, rng)
        labels = np.zeros(n, dtype=int)
        prev_inertia = np.inf
        for _ in range(max_iter):
            d2 = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
            labels = np.argmin(d2, axis=1)
            for c in range(k):
                mask = labels == c
                if mask.any():
                    centers[c] = X[mask].mean(axis=0)
                else:
                    # revive an empty cluster with the worst-assigned point
                    far = int(np.argmax(d2[np.arange(n), labels]))
                    centers[c] = X[far]
                    labels[far] = c
            inertia = float(np.sum((X - centers[labels]) ** 2))
            if prev_inertia - inertia <= tol:
                break
            prev_inertia = inertia
        inertia = float(np.sum((X - centers[labels]) ** 2))
        if inertia < best_inertia:
            best_inertia, best_labels = inertia, labels.copy()
    return best_labels, best_inertia


def spectral_cluster(
    W_bd: np.ndarray,
    k: int,
    seed: int = 0,
    mode: EigenMode = "generalized",
    order: np.ndarray | None = None,
    report: Type1Report | None = None,
    n_total: int | None = None,
) -> np.ndarray:
    """k-means on the rows of the k smallest eigenvectors of the Laplacian.

    Labels come back 1..k. When an ordering and a removal report are given,
    they are undone so labels align with the original sample order, with 0
    marking removed vertices.
    """
    g = SymmetricGraph(W_bd)
    spec = eig_smallest(g, mode, k)
    labels_ordered, _ = kmeans(spec.eigenvectors, k, seed=seed)
    labels_ordered = labels_ordered + 1

    if order is None and report is None:
        return labels_ordered
    if order is not None:
        undone = np.empty_like(labels_ordered)
        undone[np.asarray(order)] = labels_ordered
    else:
        undone = labels_ordered
    if report is None:
        return undone
    total = n_total if n_total is not None else len(report.kept_indices) + len(report.outlier_indices)
    full = np.zeros(total, dtype=int)
    full[np.asarray(report.kept_indices)] = undone
    return full


def accuracy(labels: Sequence[int], truth: Sequence[int]) -> float:
    """Best label-permutation match fraction (Hungarian assignment).

    Label 0 is reserved for outliers on both sides and only matches itself.
    """
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    if labels.shape != truth.shape:
        raise LengthMismatch(f"label vectors differ in length: {labels.shape} vs {truth.shape}")
    n = len(labels)
    ids_est = np.unique(labels[labels != 0])
    ids_true = np.unique(truth[truth != 0])
    confusion = np.zeros((len(ids_est), len(ids_true)))
    for a, le in enumerate(ids_est):
        for b, lt in enumerate(ids_true):
            confusion[a, b] = np.sum((labels == le) & (truth == lt))
    matched = 0.0
    if confusion.size:
        rows, cols = scipy.optimize.linear_sum_assignment(confusion, maximize=True)
        matched = float(confusion[rows, cols].sum())
    matched += float(np.sum((labels == 0) & (truth == 0)))
    return matched / n


def modularity(W: np.ndarray, labels: Sequence[int]) -> float:
    """(1/2g) sum over same-label pairs of [w_mn - d_m d_n / 2g], diagonal included."""
    W = np.asarray(W, dtype=float)
    labels = np.asarray(labels)
    if len(labels) != W.shape[0]:
        raise LengthMismatch("labels must cover every vertex")
    d = W.sum(axis=1)
    two_g = float(d.sum())
    if two_g == 0:
        raise EmptyGraph()
    total = 0.0
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        total += float(W[np.ix_(idx, idx)].sum()) - float(d[idx].sum()) ** 2 / two_g
    return total / two_g


def conductance(W: np.ndarray, labels: Sequence[int]) -> float:
    """Fraction of edge weight crossing label boundaries."""
    W = np.asarray(W, dtype=float)
    labels = np.asarray(labels)
    if len(labels) != W.shape[0]:
        raise LengthMismatch("labels must cover every vertex")
    total = float(W.sum())
    if total == 0:
        raise EmptyGraph()
    same = labels[:, None] == labels[None, :]
    cross = float(W[~same].sum())
    return cross / total


def p_det(k_hats: Sequence[int], k_true: int) -> float:
    """Fraction of trials that detected the true block count."""
    if len(k_hats) == 0:
        raise ValueError("need at least one trial")
    return float(np.mean(np.asarray(k_hats) == k_true))
