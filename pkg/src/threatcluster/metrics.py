"""External cluster-validity metrics: homogeneity, completeness, V-measure,
plus the information-reduction percentage.

All entropies are natural-log; the base cancels in the ratios.  Conventions:
H(classes) = 0 makes homogeneity 1, H(clusters) = 0 makes completeness 1,
and V = 0 when both scores are 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cluster import NOISE, Clustering, noise_to_singletons


@dataclass(eq=False)
class ContingencyTable:
    """Counts of documents per (class, cluster) cell."""

    counts: np.ndarray  # shape (n_classes, n_clusters)
    class_labels: tuple[str, ...]
    n: int

    @property
    def class_marginals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def cluster_marginals(self) -> np.ndarray:
        return self.counts.sum(axis=0)


@dataclass(frozen=True)
class ClusterScores:
    h: float
    c: float
    v: float
    beta: float = 1.0


@dataclass
class EvalRow:
    """One (clusterer, embedding, distance) combination's scores and timings."""

    clusterer: str
    embedding: str
    metric: str
    h: float | None = None
    c: float | None = None
    v: float | None = None
    n_clusters: int | None = None
    reduction_percent: float | None = None
    t_embed: float | None = None
    t_cluster: float | None = None
    rank: int | None = None
    error: str | None = None


def contingency(truth: Sequence[str], pred: Clustering) -> ContingencyTable:
    """Exact (class, cluster) counts; the prediction must be noise-free."""
    labels = pred.assignment
    if len(truth) != labels.shape[0]:
        raise ValueError(f"length mismatch: {len(truth)} labels vs {labels.shape[0]} assignments")
    if (labels == NOISE).any():
        raise ValueError("prediction still contains noise; apply noise_to_singletons first")
    classes = sorted(set(truth))
    class_index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), pred.n_clusters), dtype=np.int64)
    for label, cluster in zip(truth, labels.tolist()):
        counts[class_index[label], cluster] += 1
    return ContingencyTable(counts=counts, class_labels=tuple(classes), n=len(truth))


def _entropy(marginals: np.ndarray, n: int) -> float:
    p = marginals[marginals > 0] / n
    return float(-(p * np.log(p)).sum())


def _conditional_entropy(counts: np.ndarray, conditioned_marginals: np.ndarray, n: int) -> float:
    """H(rows | columns) when conditioned_marginals are the column sums."""
    total = 0.0
    nz = counts > 0
    rows, cols = np.nonzero(nz)
    cell = counts[rows, cols].astype(np.float64)
    total = -(cell / n * np.log(cell / conditioned_marginals[cols])).sum()
    return float(total)


def v_measure(h: float, c: float, beta: float = 1.0) -> float:
    """Weighted harmonic mean (1 + beta) * h * c / (beta * h + c); 0 when the
    denominator vanishes."""
    denom = beta * h + c
    if denom <= 0.0:
        return 0.0
    return (1.0 + beta) * h * c / denom


def homogeneity_completeness_v(table: ContingencyTable, beta: float = 1.0) -> ClusterScores:
    if table.n < 1:
        raise ValueError("scores need at least one document")
    if beta <= 0:
        raise ValueError("beta must be > 0")
    class_m = table.class_marginals
    cluster_m = table.cluster_marginals
    h_classes = _entropy(class_m, table.n)
    h_clusters = _entropy(cluster_m, table.n)
    if h_classes == 0.0:
        h = 1.0
    else:
        h_c_given_k = _conditional_entropy(table.counts, cluster_m, table.n)
        h = 1.0 - h_c_given_k / h_classes
    if h_clusters == 0.0:
        c = 1.0
    else:
        h_k_given_c = _conditional_entropy(table.counts.T, class_m, table.n)
        c = 1.0 - h_k_given_c / h_clusters
    return ClusterScores(h=h, c=c, v=v_measure(h, c, beta), beta=beta)


def reduction(n_docs: int, n_clusters: int) -> float:
    """Information reduction in percent: 100 * (1 - n_clusters / n_docs)."""
    if n_docs < 1:
        raise ValueError("n_docs must be >= 1")
    return 100.0 * (1.0 - n_clusters / n_docs)


def score(truth: Sequence[str], pred: Clustering, beta: float = 1.0) -> ClusterScores:
    """noise_to_singletons -> contingency -> homogeneity/completeness/V."""
    return homogeneity_completeness_v(contingency(truth, noise_to_singletons(pred)), beta=beta)
