"""Batch document embedding.

SBERT path: tokenize with the model's own tokenizer (no special tokens),
apply the truncation strategy to the ids, decode back to text and encode in
batches with L2 normalization.  The decode/re-encode round trip can shift a
token or two at the boundary; the model's 512-token window still caps the
input.  Inference only, so outputs are deterministic for a fixed model.

doc2vec path: optional, needs gensim and a pre-trained model file; vectors
are inferred with a fixed seed and L2-normalized.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .truncate import TruncationStrategy, truncate


def embed_with_sbert(
    rows: Sequence[tuple[str, str]],
    model_name: str,
    strat: TruncationStrategy,
    batch_size: int = 32,
    device: str | None = None,
) -> list[tuple[str, np.ndarray]]:
    from sentence_transformers import SentenceTransformer

    model = SentenceTransformer(model_name, device=device)
    model.max_seq_length = 512
    tokenizer = model.tokenizer
    texts = []
    for _, text in rows:
        ids = tokenizer(text, add_special_tokens=False, truncation=False)["input_ids"]
        kept = truncate(ids, strat)
        texts.append(tokenizer.decode(kept, skip_special_tokens=True))
    vectors = model.encode(
        texts,
        batch_size=batch_size,
        normalize_embeddings=True,
        convert_to_numpy=True,
        show_progress_bar=False,
    )
    return [(doc_id, np.asarray(vec, dtype=np.float64)) for (doc_id, _), vec in zip(rows, vectors)]


def embed_with_doc2vec(
    rows: Sequence[tuple[str, str]],
    model_path: str,
    seed: int = 0,
) -> list[tuple[str, np.ndarray]]:
    try:
        from gensim.models.doc2vec import Doc2Vec
    except ImportError as exc:
        raise RuntimeError(
            "doc2vec embedding needs gensim (pip install 'threatcluster-embedder[doc2vec]')"
        ) from exc
    model = Doc2Vec.load(model_path)
    model.random.seed(seed)
    out: list[tuple[str, np.ndarray]] = []
    for doc_id, text in rows:
        tokens = text.lower().split()
        vec = np.asarray(model.infer_vector(tokens), dtype=np.float64)
        norm = float(np.linalg.norm(vec))
        if norm > 0:
            vec = vec / norm
        out.append((doc_id, vec))
    return out
