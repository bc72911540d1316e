"""Sparse TF-IDF embeddings with refit-on-new-data vocabulary semantics.

The vocabulary is always rebuilt from the corpus at hand, so out-of-vocabulary
terms in fresh data are handled by refitting rather than by hashing tricks.
Weighting: tf = raw term count, idf = ln((1 + n_docs) / (1 + df)) + 1, rows
L2-normalized.  TF-IDF matrices are stored sparse (vocabulary sizes reach
10^4 and beyond); imported dense vectors use plain arrays.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse

from .preprocess import TokenList, ngrams

KINDS = ("tfidf1", "tfidf2", "tfidf3", "doc2vec", "sbert_h", "sbert_t", "sbert_ht")
TFIDF_KINDS = ("tfidf1", "tfidf2", "tfidf3")
DENSE_KINDS = ("doc2vec", "sbert_h", "sbert_t", "sbert_ht")


@dataclass(eq=False)
class EmbeddingMatrix:
    """Row-per-document vectors, order-aligned with the corpus.

    ``data`` is either a scipy CSR matrix or a dense float64 ndarray; the two
    are never mixed.  All values must be finite.
    """

    kind: str
    data: sparse.csr_matrix | np.ndarray

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown embedding kind {self.kind!r}")
        if sparse.issparse(self.data):
            self.data = self.data.tocsr()
            self.data.sort_indices()
            if not np.all(np.isfinite(self.data.data)):
                raise ValueError("embedding matrix contains non-finite values")
        else:
            self.data = np.asarray(self.data, dtype=np.float64)
            if self.data.ndim != 2:
                raise ValueError("dense embedding matrix must be 2-D")
            if not np.all(np.isfinite(self.data)):
                raise ValueError("embedding matrix contains non-finite values")

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.data)

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def toarray(self) -> np.ndarray:
        return self.data.toarray() if self.is_sparse else self.data


@dataclass(eq=False)
class Vocabulary:
    """Term -> column map fitted on one corpus; columns are lexicographic."""

    index: dict[str, int]
    document_frequency: np.ndarray  # per column, in [1, n_docs_fitted]
    n_docs_fitted: int
    ngram_max: int

    def __len__(self) -> int:
        return len(self.index)


def fit_vocabulary(token_lists: Sequence[TokenList], ngram_max: int) -> Vocabulary:
    """Collect every n-gram present in at least one document."""
    if len(token_lists) == 0:
        raise ValueError("cannot fit a vocabulary on an empty corpus")
    if ngram_max not in (1, 2, 3):
        raise ValueError("ngram_max must be 1, 2 or 3")
    df: Counter[str] = Counter()
    for tokens in token_lists:
        df.update(set(ngrams(tokens, ngram_max)))
    terms = sorted(df)
    index = {term: col for col, term in enumerate(terms)}
    frequencies = np.array([df[t] for t in terms], dtype=np.int64)
    return Vocabulary(
        index=index,
        document_frequency=frequencies,
        n_docs_fitted=len(token_lists),
        ngram_max=ngram_max,
    )


def transform(token_lists: Sequence[TokenList], vocab: Vocabulary) -> EmbeddingMatrix:
    """TF-IDF rows for ``token_lists`` under a fitted vocabulary.

    Out-of-vocabulary terms are ignored; a document with no in-vocabulary
    term yields an all-zero row (normalization skipped).
    """
    n_docs = vocab.n_docs_fitted
    idf = np.log((1.0 + n_docs) / (1.0 + vocab.document_frequency)) + 1.0
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for tokens in token_lists:
        counts = Counter(ngrams(tokens, vocab.ngram_max))
        cols = sorted(
            vocab.index[t] for t in counts if t in vocab.index
        )
        row = np.empty(len(cols), dtype=np.float64)
        col_terms = {vocab.index[t]: c for t, c in counts.items() if t in vocab.index}
        for j, col in enumerate(cols):
            row[j] = col_terms[col] * idf[col]
        norm = math.sqrt(float(np.dot(row, row)))
        if norm > 0.0:
            row /= norm
        indices.extend(cols)
        data.extend(row)
        indptr.append(len(indices))
    matrix = sparse.csr_matrix(
        (np.array(data, dtype=np.float64), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(token_lists), len(vocab)),
    )
    return EmbeddingMatrix(kind=f"tfidf{vocab.ngram_max}", data=matrix)
