"""Text normalization for the statistical embeddings.

Pipeline: lowercase + split on non-alphanumeric boundaries, drop stopwords,
stem with the English Snowball algorithm.  Digit-only tokens survive on
purpose: identifiers like CVE numbers and product versions carry signal in
security text.  Transformer-based embeddings bypass this module entirely.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

from . import _snowball
from .corpus import Document

TokenList = list[str]

# Runs of unicode letters/digits; underscore and punctuation split tokens.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> TokenList:
    return _TOKEN_RE.findall(text.lower())


def remove_stopwords(tokens: TokenList, stoplist: set[str]) -> TokenList:
    return [t for t in tokens if t not in stoplist]


def stem(tokens: TokenList) -> TokenList:
    return [_snowball.stem(t) for t in tokens]


def preprocess(doc: Document | str, stoplist: set[str]) -> TokenList:
    """tokenize -> remove_stopwords -> stem, in that order."""
    text = doc.text if isinstance(doc, Document) else doc
    return stem(remove_stopwords(tokenize(text), stoplist))


def ngrams(tokens: TokenList, n_max: int) -> list[str]:
    """All contiguous k-grams for k = 1..n_max, space-joined.

    Emitted by k, then by position; n_max must be 1, 2 or 3.
    """
    if n_max not in (1, 2, 3):
        raise ValueError("n_max must be 1, 2 or 3")
    out = list(tokens)
    for k in range(2, n_max + 1):
        out.extend(" ".join(tokens[i : i + k]) for i in range(len(tokens) - k + 1))
    return out


def load_stopwords(path: str | Path) -> set[str]:
    """Read a stopword file: UTF-8, one word per line, '#' comments ignored."""
    words: set[str] = set()
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line)
    return words


def default_stopwords() -> set[str]:
    """The packaged 179-word English stopword list."""
    ref = resources.files("threatcluster").joinpath("data/stopwords_english.txt")
    words: set[str] = set()
    for line in ref.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return words
