"""Evaluation: pair-counting accuracy, mismatch counts, RatioCut, eigengap profiles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import LabelSequence
from .graphs import Laplacian, WeightedGraph, smallest_eigenvectors


def pair_accuracy(est, truth) -> float:
    """Fraction of distinct node pairs on which the two labelings agree about
    co-membership. Invariant to renaming labels on either side. Streams one row
    at a time, so no n x n indicator matrix is materialized."""
    est = np.asarray(est)
    truth = np.asarray(truth)
    if est.shape != truth.shape or est.ndim != 1:
        raise ValueError("label vectors must be 1-D and of equal length")
    n = est.size
    if n < 2:
        raise ValueError("need at least two nodes")
    agree = 0
    for i in range(n - 1):
        same_e = est[i + 1 :] == est[i]
        same_t = truth[i + 1 :] == truth[i]
        agree += int((same_e == same_t).sum())
    return 2.0 * agree / (n * (n - 1))


def mismatch_count(labels_t, labels_prev) -> int:
    """Number of nodes whose label differs between two (already aligned) frames."""
    a = np.asarray(labels_t)
    b = np.asarray(labels_prev)
    if a.shape != b.shape:
        raise ValueError("label vectors must have equal length")
    return int((a != b).sum())


def ratiocut(g: WeightedGraph, labels, k: int) -> float:
    """Sum over clusters of (crossing edge weight) / (cluster size)."""
    labels = np.asarray(labels)
    if labels.shape != (g.n,):
        raise ValueError(f"labels must have length {g.n}")
    if labels.min() < 0 or labels.max() >= k:
        raise ValueError("labels must lie in [0, k)")
    sizes = np.bincount(labels, minlength=k)
    if np.any(sizes == 0):
        raise ValueError("every cluster must be nonempty")
    i, j, w = g.edge_arrays()
    cross = labels[i] != labels[j]
    total = 0.0
    for c in range(k):
        touches = cross & ((labels[i] == c) | (labels[j] == c))
        total += float(w[touches].sum()) / sizes[c]
    return total


def eigengap_profile(L: Laplacian, m: int) -> np.ndarray:
    """Consecutive differences of the m smallest eigenvalues (m - 1 gaps)."""
    vals, _ = smallest_eigenvectors(L, m)
    return np.diff(vals)


@dataclass(frozen=True, eq=False)
class AccuracyReport:
    """Per-frame accuracy against a reference labeling, plus the estimate's own
    frame-to-frame label changes (callers align the estimate first)."""

    per_frame: np.ndarray
    mean: float
    mismatch_per_frame: np.ndarray

    def __post_init__(self):
        pf = np.array(self.per_frame, dtype=float)
        mm = np.array(self.mismatch_per_frame, dtype=np.int64)
        if pf.ndim != 1 or mm.shape != (pf.size - 1,):
            raise ValueError("need T accuracies and T-1 mismatch counts")
        pf.setflags(write=False)
        mm.setflags(write=False)
        object.__setattr__(self, "per_frame", pf)
        object.__setattr__(self, "mismatch_per_frame", mm)


def accuracy_report(est: LabelSequence, truth: LabelSequence) -> AccuracyReport:
    if est.t_len != truth.t_len or est.n != truth.n:
        raise ValueError("estimate and reference must have the same shape")
    per_frame = np.array(
        [pair_accuracy(est.frame(t), truth.frame(t)) for t in range(est.t_len)]
    )
    mismatches = np.array(
        [mismatch_count(est.frame(t), est.frame(t - 1)) for t in range(1, est.t_len)],
        dtype=np.int64,
    )
    return AccuracyReport(per_frame, float(per_frame.mean()), mismatches)
