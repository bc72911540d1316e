"""Pairwise distances (euclidean, cosine, manhattan) over embedding matrices.

Sparse inputs stay sparse: euclidean and cosine go through a blocked Gram
product, manhattan through a compiled CSR merge kernel.  Matrices are
materialized in full (n stays in the low thousands here), exactly symmetric,
with zero diagonals.

Zero-vector convention for cosine: distance 1 to everything, 0 to another
zero vector.  This keeps the matrix total on corpora with empty documents.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from scipy import sparse
from scipy.spatial.distance import cdist

from .tfidf import EmbeddingMatrix

METRICS = ("euclidean", "cosine", "manhattan")

_GRAM_BLOCK = 512


@dataclass(eq=False)
class DistanceMatrix:
    """Symmetric n x n non-negative distances, tagged with the metric."""

    metric: str
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ValueError("distance matrix must be square")

    @property
    def n(self) -> int:
        return self.values.shape[0]


def distance(u, v, metric: str) -> float:
    """Distance between two 1-D vectors; the scalar reference path."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    if metric == "euclidean":
        d = u - v
        return float(np.sqrt(np.dot(d, d)))
    if metric == "manhattan":
        return float(np.abs(u - v).sum())
    if metric == "cosine":
        nu = float(np.sqrt(np.dot(u, u)))
        nv = float(np.sqrt(np.dot(v, v)))
        if nu == 0.0 and nv == 0.0:
            return 0.0
        if nu == 0.0 or nv == 0.0:
            return 1.0
        return float(np.clip(1.0 - np.dot(u, v) / (nu * nv), 0.0, 2.0))
    raise ValueError(f"unknown metric {metric!r}")


@numba.njit(cache=True, parallel=True)
def _manhattan_csr(indptr, indices, data, n, out):  # pragma: no cover - compiled
    for i in numba.prange(n):
        for j in range(i + 1, n):
            pi = indptr[i]
            pj = indptr[j]
            ei = indptr[i + 1]
            ej = indptr[j + 1]
            acc = 0.0
            while pi < ei and pj < ej:
                ci = indices[pi]
                cj = indices[pj]
                if ci == cj:
                    acc += abs(data[pi] - data[pj])
                    pi += 1
                    pj += 1
                elif ci < cj:
                    acc += abs(data[pi])
                    pi += 1
                else:
                    acc += abs(data[pj])
                    pj += 1
            while pi < ei:
                acc += abs(data[pi])
                pi += 1
            while pj < ej:
                acc += abs(data[pj])
                pj += 1
            out[i, j] = acc
            out[j, i] = acc


def _gram(x: sparse.csr_matrix) -> np.ndarray:
    """Dense X @ X.T computed in fixed row blocks."""
    n = x.shape[0]
    xt = x.T.tocsr()
    gram = np.empty((n, n), dtype=np.float64)
    for start in range(0, n, _GRAM_BLOCK):
        stop = min(start + _GRAM_BLOCK, n)
        gram[start:stop] = (x[start:stop] @ xt).toarray()
    return gram


def _symmetrize(values: np.ndarray) -> np.ndarray:
    upper = np.triu(values, 1)
    return upper + upper.T


def pairwise(matrix: EmbeddingMatrix, metric: str) -> DistanceMatrix:
    """Full symmetric distance matrix over the rows of ``matrix``."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    n = matrix.n_rows
    if n == 0:
        return DistanceMatrix(metric=metric, values=np.zeros((0, 0)))

    if metric == "manhattan":
        if matrix.is_sparse:
            x = matrix.data
            out = np.zeros((n, n), dtype=np.float64)
            _manhattan_csr(x.indptr, x.indices, x.data, n, out)
            values = out
        else:
            values = cdist(matrix.data, matrix.data, metric="cityblock")
        return DistanceMatrix(metric=metric, values=_symmetrize(values))

    if matrix.is_sparse:
        gram = _gram(matrix.data)
        sq = np.asarray(matrix.data.multiply(matrix.data).sum(axis=1)).ravel()
    else:
        gram = matrix.data @ matrix.data.T
        sq = np.einsum("ij,ij->i", matrix.data, matrix.data)

    if metric == "euclidean":
        d2 = sq[:, None] + sq[None, :] - 2.0 * gram
        values = np.sqrt(np.maximum(d2, 0.0))
        return DistanceMatrix(metric=metric, values=_symmetrize(values))

    # cosine
    norms = np.sqrt(sq)
    zero = norms == 0.0
    safe = np.where(zero, 1.0, norms)
    sim = gram / safe[:, None] / safe[None, :]
    values = np.clip(1.0 - sim, 0.0, 2.0)
    if zero.any():
        values[zero, :] = 1.0
        values[:, zero] = 1.0
        values[np.ix_(zero, zero)] = 0.0
    return DistanceMatrix(metric=metric, values=_symmetrize(values))
