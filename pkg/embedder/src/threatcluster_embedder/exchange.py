"""Writer for the vector exchange format consumed by the clustering core.

Format (UTF-8):

    #threatcluster-vectors v1 dim=<d> kind=<k> model=<name> count=<n>
    <id>\\t<v1>,<v2>,...,<vd>

Floats carry 9 significant digits, the core's canonical formatting, so files
written here survive a read/re-write through the core byte for byte.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

_MAGIC = "#threatcluster-vectors v1"


def write_exchange(
    path: str | Path,
    kind: str,
    model_name: str,
    rows: Sequence[tuple[str, Sequence[float]]],
) -> None:
    if not rows and rows != []:
        rows = list(rows)
    dim = len(rows[0][1]) if rows else 1
    lines = [f"{_MAGIC} dim={dim} kind={kind} model={model_name} count={len(rows)}"]
    seen: set[str] = set()
    for doc_id, vec in rows:
        if doc_id in seen:
            raise ValueError(f"duplicate vector id {doc_id!r}")
        seen.add(doc_id)
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (dim,):
            raise ValueError(f"vector for id {doc_id!r} has shape {vec.shape}, expected ({dim},)")
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"vector for id {doc_id!r} contains non-finite values")
        lines.append(doc_id + "\t" + ",".join(format(float(v), ".9g") for v in vec))
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def read_corpus_jsonl(path: str | Path) -> list[tuple[str, str]]:
    """(id, text) pairs from a corpus JSONL file, in file order."""
    out: list[tuple[str, str]] = []
    seen: set[str] = set()
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            doc_id = obj.get("id")
            text = obj.get("text")
            if not isinstance(doc_id, str) or not doc_id or not isinstance(text, str):
                raise ValueError(f"{path}:{lineno}: expected string 'id' and 'text'")
            if doc_id in seen:
                raise ValueError(f"{path}:{lineno}: duplicate document id {doc_id!r}")
            seen.add(doc_id)
            out.append((doc_id, text))
    return out
