"""Evaluation harness: run the embeddings x distances x clusterers matrix,
rank rows by V-measure, and benchmark runtime against corpus size.

Clusterer policies mirror the evaluation protocol: k-means sweeps k up to
sqrt(n) and keeps the best silhouette, DBSCAN grid-searches (eps,
min_samples) for the best V-measure, OPTICS runs with min_samples = 2.
Noise points become singleton clusters before counting and scoring.

Timing convention: t_embed covers embedding only (for TF-IDF: preprocessing,
vocabulary fit and transform; for imported vectors: the file load).
Distance-matrix construction is charged to t_cluster.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .cluster import Clustering, auto_kmeans, dbscan_grid, noise_to_singletons, optics
from .corpus import LabeledCorpus, load_jsonl, singletons_to_unlabeled, subsample
from .dense_io import read_vectors
from .distance import METRICS, DistanceMatrix, pairwise
from .metrics import EvalRow, contingency, homogeneity_completeness_v, reduction
from .preprocess import default_stopwords, preprocess
from .tfidf import DENSE_KINDS, KINDS, TFIDF_KINDS, EmbeddingMatrix, fit_vocabulary, transform

CLUSTERERS = ("kmeans", "dbscan", "optics")

EMBEDDING_NAMES = {
    "tfidf1": "TF-IDF",
    "tfidf2": "TF-IDF2",
    "tfidf3": "TF-IDF3",
    "doc2vec": "doc2vec",
    "sbert_h": "SBERT_H",
    "sbert_t": "SBERT_T",
    "sbert_ht": "SBERT_HT",
}
CLUSTERER_NAMES = {"kmeans": "K-M.", "dbscan": "DBS", "optics": "OPT"}
METRIC_NAMES = {"cosine": "cos.", "euclidean": "euc.", "manhattan": "man."}

_REPORT_COLUMNS = ("#", "Clus.", "Emb.", "Dist.", "H", "C", "V", "#C", "Red. [%]")
_CSV_COLUMNS = (
    "rank",
    "clusterer",
    "embedding",
    "distance",
    "h",
    "c",
    "v",
    "n_clusters",
    "reduction_percent",
    "t_embed",
    "t_cluster",
    "error",
)


@dataclass
class RunConfig:
    corpus: str
    embeddings: tuple[str, ...] = TFIDF_KINDS
    metrics: tuple[str, ...] = METRICS
    clusterers: tuple[str, ...] = CLUSTERERS
    vector_files: dict[str, str] = field(default_factory=dict)
    beta: float = 1.0
    seed: int = 0
    threshold: float = 0.4
    workers: int | None = None
    outdir: str = "out"
    stopwords: str | None = None

    def __post_init__(self) -> None:
        for kind in self.embeddings:
            if kind not in KINDS:
                raise ValueError(f"unknown embedding kind {kind!r}")
        for metric in self.metrics:
            if metric not in METRICS:
                raise ValueError(f"unknown distance metric {metric!r}")
        for clus in self.clusterers:
            if clus not in CLUSTERERS:
                raise ValueError(f"unknown clusterer {clus!r}")
        if not self.embeddings or not self.metrics or not self.clusterers:
            raise ValueError("each axis needs at least one entry")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("report threshold must lie in [0, 1]")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")


@dataclass
class BenchmarkRecord:
    corpus_size: int
    clusterer: str
    t_embed: float
    t_cluster: float
    t_sum: float


def _load_stoplist(cfg: RunConfig) -> set[str]:
    if cfg.stopwords:
        from .preprocess import load_stopwords

        return load_stopwords(cfg.stopwords)
    return default_stopwords()


def embed_corpus(
    corpus: LabeledCorpus,
    kind: str,
    stoplist: set[str] | None = None,
    vector_files: dict[str, str] | None = None,
) -> EmbeddingMatrix:
    """Produce the embedding matrix for one kind (TF-IDF natively, dense
    kinds from their exchange files)."""
    if kind in TFIDF_KINDS:
        if stoplist is None:
            stoplist = default_stopwords()
        tokens = [preprocess(doc, stoplist) for doc in corpus]
        vocab = fit_vocabulary(tokens, ngram_max=int(kind[-1]))
        return transform(tokens, vocab)
    if kind in DENSE_KINDS:
        path = (vector_files or {}).get(kind)
        if not path:
            raise ValueError(
                f"embedding kind {kind!r} needs a vector file (produced by the embedder sidecar)"
            )
        return read_vectors(path, corpus)
    raise ValueError(f"unknown embedding kind {kind!r}")


def _cluster_once(
    clusterer: str,
    matrix: EmbeddingMatrix,
    dm: DistanceMatrix,
    truth: Sequence[str],
    seed: int,
    beta: float,
) -> Clustering:
    if clusterer == "kmeans":
        return auto_kmeans(matrix, dm.metric, seed=seed, dm=dm)
    if clusterer == "dbscan":
        return dbscan_grid(dm, truth, beta=beta).best_clustering
    if clusterer == "optics":
        return optics(dm, min_samples=2)
    raise ValueError(f"unknown clusterer {clusterer!r}")


def _finish_row(
    row: EvalRow, clustering: Clustering, truth: Sequence[str], beta: float
) -> tuple[EvalRow, Clustering]:
    final = noise_to_singletons(clustering)
    scores = homogeneity_completeness_v(contingency(truth, final), beta=beta)
    row.h = scores.h
    row.c = scores.c
    row.v = scores.v
    row.n_clusters = final.n_clusters
    row.reduction_percent = reduction(len(truth), final.n_clusters)
    return row, final


def run_combination(
    corpus: LabeledCorpus,
    kind: str,
    metric: str,
    clusterer: str,
    cfg: RunConfig,
) -> EvalRow:
    """Run a single combination end to end; raises on failure."""
    truth = corpus.labels()
    stoplist = _load_stoplist(cfg)
    t0 = time.perf_counter()
    matrix = embed_corpus(corpus, kind, stoplist, cfg.vector_files)
    t_embed = time.perf_counter() - t0
    t1 = time.perf_counter()
    dm = pairwise(matrix, metric)
    clustering = _cluster_once(clusterer, matrix, dm, truth, cfg.seed, cfg.beta)
    t_cluster = time.perf_counter() - t1
    row = EvalRow(clusterer=clusterer, embedding=kind, metric=metric, t_embed=t_embed, t_cluster=t_cluster)
    row, _ = _finish_row(row, clustering, truth, cfg.beta)
    return row


def _rank_rows(rows: list[EvalRow]) -> list[EvalRow]:
    ordered = sorted(rows, key=lambda r: -r.v if r.v is not None else math.inf)
    for rank, row in enumerate(ordered, start=1):
        row.rank = rank
    return ordered


def run_matrix(cfg: RunConfig, corpus: LabeledCorpus | None = None) -> list[EvalRow]:
    """One EvalRow per (embedding, metric, clusterer) combination, ranked by
    descending V.  Per-combination failures become rows with an error field;
    the run always completes."""
    rows, _ = run_matrix_full(cfg, corpus)
    return rows


def run_matrix_full(
    cfg: RunConfig, corpus: LabeledCorpus | None = None
) -> tuple[list[EvalRow], dict[str, Clustering]]:
    """run_matrix plus the final (noise-converted) assignment per combination."""
    if corpus is None:
        corpus = load_jsonl(cfg.corpus)
    corpus = singletons_to_unlabeled(corpus)
    truth = corpus.labels()
    stoplist = _load_stoplist(cfg)

    embeddings: dict[str, tuple[EmbeddingMatrix | None, float, str | None]] = {}
    for kind in cfg.embeddings:
        t0 = time.perf_counter()
        try:
            matrix = embed_corpus(corpus, kind, stoplist, cfg.vector_files)
            embeddings[kind] = (matrix, time.perf_counter() - t0, None)
        except Exception as exc:  # recorded, never fatal
            embeddings[kind] = (None, time.perf_counter() - t0, str(exc))

    distances: dict[tuple[str, str], tuple[DistanceMatrix | None, float, str | None]] = {}
    for kind in cfg.embeddings:
        matrix, _, err = embeddings[kind]
        for metric in cfg.metrics:
            if matrix is None:
                distances[(kind, metric)] = (None, 0.0, err)
                continue
            t0 = time.perf_counter()
            try:
                dm = pairwise(matrix, metric)
                distances[(kind, metric)] = (dm, time.perf_counter() - t0, None)
            except Exception as exc:
                distances[(kind, metric)] = (None, time.perf_counter() - t0, str(exc))

    combos = [
        (kind, metric, clusterer)
        for kind in cfg.embeddings
        for metric in cfg.metrics
        for clusterer in cfg.clusterers
    ]

    def run_cell(combo: tuple[str, str, str]) -> tuple[EvalRow, Clustering | None]:
        kind, metric, clusterer = combo
        matrix, t_embed, emb_err = embeddings[kind]
        row = EvalRow(clusterer=clusterer, embedding=kind, metric=metric, t_embed=t_embed)
        if matrix is None:
            row.error = emb_err
            return row, None
        dm, t_dist, dist_err = distances[(kind, metric)]
        if dm is None:
            row.error = dist_err
            return row, None
        t0 = time.perf_counter()
        try:
            clustering = _cluster_once(clusterer, matrix, dm, truth, cfg.seed, cfg.beta)
        except Exception as exc:
            row.t_cluster = t_dist + (time.perf_counter() - t0)
            row.error = str(exc)
            return row, None
        row.t_cluster = t_dist + (time.perf_counter() - t0)
        row, final = _finish_row(row, clustering, truth, cfg.beta)
        return row, final

    workers = cfg.workers or os.cpu_count() or 1
    if workers > 1 and len(combos) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_cell, combos))
    else:
        results = [run_cell(c) for c in combos]

    assignments: dict[str, Clustering] = {}
    rows: list[EvalRow] = []
    for (kind, metric, clusterer), (row, final) in zip(combos, results):
        rows.append(row)
        if final is not None:
            assignments[f"{clusterer}_{kind}_{metric}"] = final
    return _rank_rows(rows), assignments


def scalability_benchmark(
    corpus: LabeledCorpus,
    clusterers: Sequence[str],
    sizes: Sequence[int],
    seed: int = 0,
    stoplist: set[str] | None = None,
    beta: float = 1.0,
) -> list[BenchmarkRecord]:
    """Runtime sweep over corpus sizes using TF-IDF(1-gram) + cosine.

    Each size is drawn by deterministic resampling (with replacement once the
    base corpus is exhausted); every requested clusterer runs on the same
    embedding and distance matrix.
    """
    if stoplist is None:
        stoplist = default_stopwords()
    records: list[BenchmarkRecord] = []
    for size in sizes:
        sub = singletons_to_unlabeled(subsample(corpus, size, seed))
        truth = sub.labels()
        t0 = time.perf_counter()
        tokens = [preprocess(doc, stoplist) for doc in sub]
        vocab = fit_vocabulary(tokens, ngram_max=1)
        matrix = transform(tokens, vocab)
        t_embed = time.perf_counter() - t0
        t1 = time.perf_counter()
        dm = pairwise(matrix, "cosine")
        t_dist = time.perf_counter() - t1
        for clusterer in clusterers:
            t2 = time.perf_counter()
            _cluster_once(clusterer, matrix, dm, truth, seed, beta)
            t_algo = time.perf_counter() - t2
            t_cluster = t_dist + t_algo
            records.append(
                BenchmarkRecord(
                    corpus_size=size,
                    clusterer=clusterer,
                    t_embed=t_embed,
                    t_cluster=t_cluster,
                    t_sum=t_embed + t_cluster,
                )
            )
    return records


def _fmt(value: float | int | None) -> str:
    if value is None:
        return ""
    return repr(value)


def render_report(rows: Sequence[EvalRow], format: str = "markdown", threshold: float | None = None) -> str:
    """Render ranked rows.

    markdown: the human report (2-decimal scores, failures and sub-threshold
    rows omitted).  csv: the machine output, full precision, all rows.
    """
    if format == "markdown":
        lines = [
            "| " + " | ".join(_REPORT_COLUMNS) + " |",
            "|" + "|".join("---" for _ in _REPORT_COLUMNS) + "|",
        ]
        for row in rows:
            if row.error is not None or row.v is None:
                continue
            if threshold is not None and row.v < threshold:
                continue
            lines.append(
                "| {rank} | {clus} | {emb} | {dist} | {h:.2f} | {c:.2f} | {v:.2f} | {nc} | {red:.2f} |".format(
                    rank=row.rank,
                    clus=CLUSTERER_NAMES[row.clusterer],
                    emb=EMBEDDING_NAMES[row.embedding],
                    dist=METRIC_NAMES[row.metric],
                    h=row.h,
                    c=row.c,
                    v=row.v,
                    nc=row.n_clusters,
                    red=row.reduction_percent,
                )
            )
        return "\n".join(lines) + "\n"
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    _fmt(row.rank),
                    row.clusterer,
                    row.embedding,
                    row.metric,
                    _fmt(row.h),
                    _fmt(row.c),
                    _fmt(row.v),
                    _fmt(row.n_clusters),
                    _fmt(row.reduction_percent),
                    _fmt(row.t_embed),
                    _fmt(row.t_cluster),
                    row.error or "",
                ]
            )
        return buf.getvalue()
    raise ValueError(f"unknown report format {format!r}")


def parse_report_csv(text: str) -> list[EvalRow]:
    """Inverse of render_report(..., 'csv')."""
    reader = csv.DictReader(io.StringIO(text))
    rows: list[EvalRow] = []
    for rec in reader:
        rows.append(
            EvalRow(
                clusterer=rec["clusterer"],
                embedding=rec["embedding"],
                metric=rec["distance"],
                h=float(rec["h"]) if rec["h"] else None,
                c=float(rec["c"]) if rec["c"] else None,
                v=float(rec["v"]) if rec["v"] else None,
                n_clusters=int(rec["n_clusters"]) if rec["n_clusters"] else None,
                reduction_percent=float(rec["reduction_percent"]) if rec["reduction_percent"] else None,
                t_embed=float(rec["t_embed"]) if rec["t_embed"] else None,
                t_cluster=float(rec["t_cluster"]) if rec["t_cluster"] else None,
                rank=int(rec["rank"]) if rec["rank"] else None,
                error=rec["error"] or None,
            )
        )
    return rows


def render_benchmark_csv(records: Sequence[BenchmarkRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("corpus_size", "clusterer", "t_embed", "t_cluster", "t_sum"))
    for rec in records:
        writer.writerow(
            (rec.corpus_size, rec.clusterer, repr(rec.t_embed), repr(rec.t_cluster), repr(rec.t_sum))
        )
    return buf.getvalue()


def write_run_outputs(
    rows: Sequence[EvalRow],
    assignments: dict[str, Clustering],
    corpus_ids: Sequence[str],
    outdir: str | Path,
    threshold: float,
) -> None:
    """Write report.md, report.csv and assignments/<combo>.csv."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "report.md").write_text(render_report(rows, "markdown", threshold), encoding="utf-8")
    (outdir / "report.csv").write_text(render_report(rows, "csv"), encoding="utf-8")
    assign_dir = outdir / "assignments"
    assign_dir.mkdir(exist_ok=True)
    for combo, clustering in assignments.items():
        lines = ["id,cluster"]
        lines.extend(
            f"{doc_id},{label}" for doc_id, label in zip(corpus_ids, clustering.assignment.tolist())
        )
        (assign_dir / f"{combo}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
