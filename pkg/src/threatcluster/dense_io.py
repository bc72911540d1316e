"""Dense-vector exchange files.

Decouples the core from the embedding sidecar.  Format (UTF-8, normative):

    #threatcluster-vectors v1 dim=<d> kind=<k> model=<name> count=<n>
    <id>\\t<v1>,<v2>,...,<vd>
    ...

Floats are written with 9 significant digits ('%.9g'), which round-trips
32-bit source values and makes write -> read -> write byte-identical.  The
model name may contain spaces but not a trailing " count=<int>" sequence.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import LabeledCorpus
from .tfidf import KINDS, EmbeddingMatrix

_MAGIC = "#threatcluster-vectors v1"
_HEADER_RE = re.compile(
    r"\A#threatcluster-vectors v1 dim=(\d+) kind=(\S+) model=(.*) count=(\d+)\Z"
)


@dataclass(frozen=True)
class VectorFileHeader:
    dim: int
    kind: str
    model_name: str
    count: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.count < 0:
            raise ValueError("count must be >= 0")
        if self.kind not in KINDS:
            raise ValueError(f"unknown vector kind {self.kind!r}")


def _format_float(v: float) -> str:
    return format(float(v), ".9g")


def write_vectors(
    path: str | Path,
    header: VectorFileHeader,
    rows: Iterable[tuple[str, Sequence[float]]],
) -> None:
    """Write vectors in the exchange format; fsyncs before returning."""
    path = Path(path)
    lines = [f"{_MAGIC} dim={header.dim} kind={header.kind} model={header.model_name} count={header.count}"]
    seen: set[str] = set()
    n = 0
    for doc_id, vec in rows:
        if doc_id in seen:
            raise ValueError(f"duplicate vector id {doc_id!r}")
        seen.add(doc_id)
        vec = np.asarray(vec, dtype=np.float64)
        if vec.ndim != 1 or vec.shape[0] != header.dim:
            raise ValueError(
                f"vector for id {doc_id!r} has dimension {vec.shape}, expected ({header.dim},)"
            )
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"vector for id {doc_id!r} contains non-finite values")
        lines.append(doc_id + "\t" + ",".join(_format_float(v) for v in vec))
        n += 1
    if n != header.count:
        raise ValueError(f"header count={header.count} but {n} rows were written")
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def read_raw_vectors(path: str | Path) -> tuple[VectorFileHeader, list[tuple[str, np.ndarray]]]:
    """Parse an exchange file, preserving on-disk row order."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        match = _HEADER_RE.match(first)
        if match is None:
            raise ValueError(f"{path}: not a vector exchange file (bad header)")
        header = VectorFileHeader(
            dim=int(match.group(1)),
            kind=match.group(2),
            model_name=match.group(3),
            count=int(match.group(4)),
        )
        rows: list[tuple[str, np.ndarray]] = []
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            doc_id, sep, payload = line.partition("\t")
            if not sep or not doc_id:
                raise ValueError(f"{path}:{lineno}: malformed data line")
            try:
                vec = np.array([float(x) for x in payload.split(",")], dtype=np.float64)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad float for id {doc_id!r}") from exc
            if vec.shape[0] != header.dim:
                raise ValueError(
                    f"{path}:{lineno}: id {doc_id!r} has {vec.shape[0]} values, expected {header.dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"{path}:{lineno}: non-finite value for id {doc_id!r}")
            rows.append((doc_id, vec))
    if len(rows) != header.count:
        raise ValueError(f"{path}: header count={header.count} but file has {len(rows)} rows")
    return header, rows


def read_vectors(path: str | Path, corpus: LabeledCorpus) -> EmbeddingMatrix:
    """Load vectors and reorder them to corpus order.

    The file ids and corpus ids must be in strict bijection.
    """
    header, rows = read_raw_vectors(path)
    by_id = dict(rows)
    if len(by_id) != len(rows):
        dupes = [i for i, _ in rows if sum(1 for j, _ in rows if j == i) > 1]
        raise ValueError(f"{path}: duplicate vector ids {sorted(set(dupes))!r}")
    corpus_ids = corpus.ids()
    missing = [i for i in corpus_ids if i not in by_id]
    if missing:
        raise ValueError(f"{path}: no vector for corpus ids {missing[:5]!r}")
    extra = sorted(set(by_id) - set(corpus_ids))
    if extra:
        raise ValueError(f"{path}: vectors for unknown ids {extra[:5]!r}")
    data = np.vstack([by_id[i] for i in corpus_ids]) if corpus_ids else np.zeros((0, header.dim))
    return EmbeddingMatrix(kind=header.kind, data=data)
