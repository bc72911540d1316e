"""Shared synthetic-corpus builders for the test suite."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from threatcluster.corpus import Document, LabeledCorpus

# Disjoint per-class word banks keep classes trivially separable under
# TF-IDF: documents of one class share most words, classes share none.
_WORD_BANK = [
    "citrix gateway netscaler appliance session token hijack exploit patch advisory",
    "exchange outlook mailbox powershell backdoor webshell persistence escalation remote server",
    "ransomware lockbit encryptor extortion leak negotiation bitcoin payload affiliate double",
    "firmware router botnet mirai telnet credential scanner infection ddos amplification",
    "kernel driver privilege escalation syscall race condition sandbox escape mitigation",
    "phishing campaign lure attachment macro dropper credential harvesting smtp spoof",
    "openssl certificate handshake downgrade cipher padding oracle renegotiation validation bypass",
    "chromium sandbox renderer heap overflow usefree javascript compiler regression fuzzer",
    "kubernetes container registry secret escape runtime admission policy cluster node",
    "firewall bypass tunnel dns exfiltration covert channel beacon implant callback",
    "wordpress plugin injection sql parameter sanitizer escape query admin takeover",
    "android apk permission overlay banking trojan accessibility dropper obfuscation string",
    "ics scada plc modbus protocol spoofing logic controller safety instrumented",
    "supply dependency registry typosquat package maintainer build pipeline artifact poisoning",
    "vpn concentrator preauth overflow appliance gateway credential cache replay handshake",
    "mfa fatigue push notification prompt bombing session cookie theft proxy relay",
]


def make_neardup_corpus(
    n_classes: int,
    per_class: int,
    seed: int = 0,
    singleton_labels: int = 0,
    prefix: str = "d",
) -> LabeledCorpus:
    """Classes of near-duplicate documents with disjoint vocabularies.

    Every document carries its class's full word bank in a seeded shuffle
    plus one repeated word, so same-class cosine distances are tiny and
    cross-class distances are maximal (no shared terms).
    """
    if n_classes > len(_WORD_BANK):
        raise ValueError(f"at most {len(_WORD_BANK)} classes supported")
    rng = np.random.default_rng(seed)
    docs: list[Document] = []
    idx = 0
    for cls in range(n_classes):
        words = _WORD_BANK[cls].split()
        for _ in range(per_class):
            order = rng.permutation(len(words))
            extra = words[int(rng.integers(0, len(words)))]
            text = " ".join(words[i] for i in order) + " " + extra
            docs.append(Document(id=f"{prefix}{idx}", text=text, label=f"class{cls}"))
            idx += 1
    for s in range(singleton_labels):
        words = _WORD_BANK[(n_classes + s) % len(_WORD_BANK)].split()
        text = " ".join(words[::-1])
        docs.append(Document(id=f"{prefix}{idx}", text=text, label=f"single{s}"))
        idx += 1
    return LabeledCorpus(documents=tuple(docs))


def write_jsonl(corpus: LabeledCorpus, path: Path) -> Path:
    lines = []
    for doc in corpus:
        obj = {"id": doc.id, "text": doc.text}
        if doc.label is not None:
            obj["label"] = doc.label
        lines.append(json.dumps(obj))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def blob_matrix(centers, per_blob: int, spread: float, seed: int = 0) -> np.ndarray:
    """Gaussian blobs around the given centers."""
    rng = np.random.default_rng(seed)
    parts = [np.asarray(c) + rng.normal(0.0, spread, (per_blob, len(c))) for c in centers]
    return np.vstack(parts)


@pytest.fixture
def tiny_corpus() -> LabeledCorpus:
    return make_neardup_corpus(n_classes=4, per_class=6, seed=7)
