"""Labeled text corpora: JSONL loading, structural statistics, label hygiene.

A corpus is an ordered, immutable sequence of documents.  Documents carry an
optional ground-truth class label; a missing label means "unlabeled".  Labels
that occur exactly once can be folded into the reserved ``__unlabeled__``
class, which then behaves like any other class during scoring.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from pathlib import Path

import numpy as np

UNLABELED = "__unlabeled__"


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    label: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("document id must be a nonempty string")
        if self.label is not None and not self.label:
            raise ValueError(f"document {self.id!r}: label present but empty")


@dataclass(frozen=True)
class LabeledCorpus:
    """Ordered documents with unique ids; iteration order equals load order."""

    documents: tuple[Document, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for doc in self.documents:
            if doc.id in seen:
                raise ValueError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __getitem__(self, i: int) -> Document:
        return self.documents[i]

    @property
    def label_set(self) -> set[str]:
        return {d.label for d in self.documents if d.label is not None}

    def ids(self) -> list[str]:
        return [d.id for d in self.documents]

    def labels(self, fill: str = UNLABELED) -> list[str]:
        """Per-document labels with unlabeled documents mapped to ``fill``."""
        return [d.label if d.label is not None else fill for d in self.documents]


@dataclass(frozen=True)
class CorpusStats:
    """Character-length statistics plus the distinct class count.

    Lengths are unicode code point counts of the raw text.  For an empty
    corpus the length fields are None.  ``n_classes`` never counts the
    reserved unlabeled marker.
    """

    size: int
    mean_len: float | None
    median_len: float | None
    min_len: int | None
    max_len: int | None
    n_classes: int


def load_jsonl(path: str | Path) -> LabeledCorpus:
    """Load a corpus from a UTF-8 JSONL file.

    Each non-blank line must be a JSON object with string keys "id" and
    "text" and an optional string "label".  Other keys are ignored.
    """
    path = Path(path)
    docs: list[Document] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise ValueError(f"{path}:{lineno}: expected a JSON object")
            doc_id = obj.get("id")
            text = obj.get("text")
            label = obj.get("label")
            if not isinstance(doc_id, str) or not doc_id:
                raise ValueError(f"{path}:{lineno}: missing or invalid 'id'")
            if not isinstance(text, str):
                raise ValueError(f"{path}:{lineno}: missing or invalid 'text'")
            if label is not None and (not isinstance(label, str) or not label):
                raise ValueError(f"{path}:{lineno}: invalid 'label'")
            if doc_id in seen:
                raise ValueError(f"{path}:{lineno}: duplicate document id {doc_id!r}")
            seen.add(doc_id)
            docs.append(Document(id=doc_id, text=text, label=label))
    return LabeledCorpus(documents=tuple(docs))


def corpus_stats(corpus: LabeledCorpus) -> CorpusStats:
    n_classes = len(corpus.label_set - {UNLABELED})
    if len(corpus) == 0:
        return CorpusStats(0, None, None, None, None, n_classes)
    lengths = [len(d.text) for d in corpus]
    return CorpusStats(
        size=len(corpus),
        mean_len=sum(lengths) / len(lengths),
        median_len=statistics.median(lengths),
        min_len=min(lengths),
        max_len=max(lengths),
        n_classes=n_classes,
    )


def singletons_to_unlabeled(corpus: LabeledCorpus) -> LabeledCorpus:
    """Fold every label held by exactly one document into ``UNLABELED``.

    Idempotent: the marker itself is exempt, so a second pass is a no-op.
    Documents without a label are left alone.
    """
    counts: dict[str, int] = {}
    for doc in corpus:
        if doc.label is not None and doc.label != UNLABELED:
            counts[doc.label] = counts.get(doc.label, 0) + 1
    singles = {label for label, k in counts.items() if k == 1}
    if not singles:
        return corpus
    docs = tuple(
        Document(id=d.id, text=d.text, label=UNLABELED) if d.label in singles else d
        for d in corpus
    )
    return LabeledCorpus(documents=docs)


def subsample(corpus: LabeledCorpus, n: int, seed: int) -> LabeledCorpus:
    """Deterministically resample ``n`` documents.

    For n <= |corpus| sampling is without replacement (n == |corpus| yields a
    permutation).  For n > |corpus| sampling is with replacement and repeated
    picks get fresh suffixed ids so corpus ids stay unique.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    size = len(corpus)
    if n == 0 or size == 0:
        return LabeledCorpus(documents=())
    rng = np.random.default_rng(seed)
    if n <= size:
        picks = rng.permutation(size)[:n]
    else:
        picks = rng.integers(0, size, size=n)
    used = {d.id for d in corpus}
    occurrences: dict[int, int] = {}
    docs: list[Document] = []
    for src in picks:
        src = int(src)
        doc = corpus[src]
        occurrences[src] = occurrences.get(src, 0) + 1
        k = occurrences[src]
        if k == 1:
            docs.append(doc)
            continue
        new_id = f"{doc.id}#{k}"
        while new_id in used:
            k += 1
            new_id = f"{doc.id}#{k}"
        used.add(new_id)
        docs.append(Document(id=new_id, text=doc.text, label=doc.label))
    return LabeledCorpus(documents=tuple(docs))
