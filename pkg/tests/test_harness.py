import numpy as np
import pytest

from conftest import make_neardup_corpus, write_jsonl
from threatcluster.corpus import load_jsonl
from threatcluster.dense_io import VectorFileHeader, write_vectors
from threatcluster.harness import (
    BenchmarkRecord,
    RunConfig,
    parse_report_csv,
    render_benchmark_csv,
    render_report,
    run_combination,
    run_matrix,
    run_matrix_full,
    scalability_benchmark,
)
from threatcluster.metrics import EvalRow
from threatcluster.tfidf import DENSE_KINDS


def _stub_vectors(corpus, tmp_path, dim=16, seed=0):
    """Write one random exchange file per dense kind."""
    rng = np.random.default_rng(seed)
    files = {}
    for kind in DENSE_KINDS:
        vecs = rng.normal(size=(len(corpus), dim))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        path = tmp_path / f"{kind}.vec"
        header = VectorFileHeader(dim=dim, kind=kind, model_name="stub", count=len(corpus))
        write_vectors(path, header, zip(corpus.ids(), vecs))
        files[kind] = str(path)
    return files


@pytest.fixture
def corpus_file(tmp_path, tiny_corpus):
    return write_jsonl(tiny_corpus, tmp_path / "corpus.jsonl")


class TestRunCombination:
    def test_separable_corpus_perfect_v(self, tmp_path, tiny_corpus):
        cfg = RunConfig(corpus="unused")
        row = run_combination(tiny_corpus, "tfidf1", "cosine", "dbscan", cfg)
        assert row.v == pytest.approx(1.0)
        assert row.error is None
        assert row.n_clusters == 4

    def test_kmeans_repeatable_apart_from_timings(self, tiny_corpus):
        cfg = RunConfig(corpus="unused", seed=3)
        a = run_combination(tiny_corpus, "tfidf1", "cosine", "kmeans", cfg)
        b = run_combination(tiny_corpus, "tfidf1", "cosine", "kmeans", cfg)
        assert (a.h, a.c, a.v, a.n_clusters, a.reduction_percent) == (
            b.h,
            b.c,
            b.v,
            b.n_clusters,
            b.reduction_percent,
        )

    def test_missing_vector_file_raises(self, tiny_corpus):
        cfg = RunConfig(corpus="unused", embeddings=("sbert_h",))
        with pytest.raises(ValueError, match="sidecar"):
            run_combination(tiny_corpus, "sbert_h", "cosine", "dbscan", cfg)


class TestRunMatrix:
    def test_restricted_axes_count(self, corpus_file):
        cfg = RunConfig(
            corpus=str(corpus_file),
            embeddings=("tfidf1", "tfidf2", "tfidf3"),
            clusterers=("optics",),
            workers=1,
        )
        rows = run_matrix(cfg)
        assert len(rows) == 9
        assert [r.rank for r in rows] == list(range(1, 10))

    def test_full_axes_63_rows(self, tmp_path, tiny_corpus, corpus_file):
        files = _stub_vectors(tiny_corpus, tmp_path)
        cfg = RunConfig(
            corpus=str(corpus_file),
            embeddings=("tfidf1", "tfidf2", "tfidf3") + DENSE_KINDS,
            vector_files=files,
            workers=2,
        )
        rows = run_matrix(cfg)
        assert len(rows) == 63
        assert all(r.error is None for r in rows)

    def test_missing_vector_file_becomes_failure_rows(self, corpus_file):
        cfg = RunConfig(
            corpus=str(corpus_file),
            embeddings=("tfidf1", "sbert_h"),
            metrics=("cosine",),
            clusterers=("optics", "dbscan"),
            workers=1,
        )
        rows = run_matrix(cfg)
        assert len(rows) == 4
        failed = [r for r in rows if r.error is not None]
        assert len(failed) == 2
        assert all(r.embedding == "sbert_h" for r in failed)
        assert all(r.rank is not None for r in rows)

    def test_sorted_by_v_descending(self, corpus_file):
        cfg = RunConfig(corpus=str(corpus_file), clusterers=("dbscan", "optics"), workers=1)
        rows = run_matrix(cfg)
        scored = [r.v for r in rows if r.v is not None]
        assert scored == sorted(scored, reverse=True)

    def test_worker_count_does_not_change_results(self, corpus_file):
        base = RunConfig(corpus=str(corpus_file), metrics=("cosine",), workers=1)
        par = RunConfig(corpus=str(corpus_file), metrics=("cosine",), workers=4)
        rows1 = run_matrix(base)
        rows2 = run_matrix(par)
        for a, b in zip(rows1, rows2):
            assert (a.clusterer, a.embedding, a.metric, a.h, a.c, a.v, a.n_clusters) == (
                b.clusterer,
                b.embedding,
                b.metric,
                b.h,
                b.c,
                b.v,
                b.n_clusters,
            )

    def test_assignments_cover_successes(self, corpus_file):
        cfg = RunConfig(corpus=str(corpus_file), metrics=("cosine",), clusterers=("dbscan",), workers=1)
        rows, assignments = run_matrix_full(cfg)
        assert set(assignments) == {f"dbscan_{r.embedding}_cosine" for r in rows}

    def test_ranking_ties_preserve_enumeration_order(self):
        from threatcluster.harness import _rank_rows

        rows = [
            EvalRow(clusterer="kmeans", embedding=e, metric=m, v=v)
            for e, m, v in [
                ("tfidf1", "cosine", 0.5),
                ("tfidf1", "euclidean", 0.9),
                ("tfidf2", "cosine", 0.5),
                ("tfidf2", "euclidean", 0.5),
            ]
        ]
        ranked = _rank_rows(list(rows))
        assert [(r.embedding, r.metric) for r in ranked] == [
            ("tfidf1", "euclidean"),
            ("tfidf1", "cosine"),
            ("tfidf2", "cosine"),
            ("tfidf2", "euclidean"),
        ]


class TestRenderReport:
    def _paper_row(self):
        return EvalRow(
            clusterer="dbscan",
            embedding="sbert_h",
            metric="cosine",
            h=0.9643332449730577,
            c=0.6083694691095265,
            v=0.7460671353023677,
            n_clusters=169,
            reduction_percent=34.74903474903475,
            t_embed=1.0,
            t_cluster=2.0,
            rank=1,
        )

    def test_markdown_formats_like_the_ranked_table(self):
        text = render_report([self._paper_row()], "markdown")
        lines = text.splitlines()
        assert lines[0] == "| # | Clus. | Emb. | Dist. | H | C | V | #C | Red. [%] |"
        assert lines[2] == "| 1 | DBS | SBERT_H | cos. | 0.96 | 0.61 | 0.75 | 169 | 34.75 |"

    def test_markdown_empty(self):
        text = render_report([], "markdown")
        assert len(text.splitlines()) == 2  # header + separator only

    def test_threshold_filters_human_report_only(self):
        low = self._paper_row()
        low.v = 0.2
        md = render_report([low], "markdown", threshold=0.4)
        csv_text = render_report([low], "csv")
        assert len(md.splitlines()) == 2
        assert len(csv_text.splitlines()) == 2

    def test_csv_round_trip(self):
        rows = [self._paper_row()]
        rows.append(
            EvalRow(clusterer="optics", embedding="tfidf1", metric="manhattan", rank=2, error="boom")
        )
        parsed = parse_report_csv(render_report(rows, "csv"))
        assert parsed == rows

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            render_report([], "html")


class TestScalabilityBenchmark:
    def test_record_shape(self, tiny_corpus):
        records = scalability_benchmark(tiny_corpus, ("kmeans", "optics"), sizes=(10, 20))
        assert len(records) == 4
        assert [r.corpus_size for r in records] == [10, 10, 20, 20]
        for rec in records:
            assert rec.t_sum == pytest.approx(rec.t_embed + rec.t_cluster, abs=1e-9)

    def test_deterministic_resample_and_clustering(self, tiny_corpus):
        a = scalability_benchmark(tiny_corpus, ("optics",), sizes=(15,), seed=2)
        b = scalability_benchmark(tiny_corpus, ("optics",), sizes=(15,), seed=2)
        assert [(r.corpus_size, r.clusterer) for r in a] == [(r.corpus_size, r.clusterer) for r in b]

    def test_benchmark_csv(self):
        records = [BenchmarkRecord(250, "kmeans", 1.0, 2.0, 3.0)]
        text = render_benchmark_csv(records)
        assert text.splitlines()[0] == "corpus_size,clusterer,t_embed,t_cluster,t_sum"
        assert text.splitlines()[1] == "250,kmeans,1.0,2.0,3.0"


class TestSingletonRule:
    def test_run_matrix_folds_singleton_labels(self, tmp_path):
        corpus = make_neardup_corpus(n_classes=3, per_class=5, seed=1, singleton_labels=2)
        path = write_jsonl(corpus, tmp_path / "c.jsonl")
        cfg = RunConfig(
            corpus=str(path), embeddings=("tfidf1",), metrics=("cosine",), clusterers=("dbscan",), workers=1
        )
        rows = run_matrix(cfg)
        assert rows[0].error is None
        # 3 real classes + the folded unlabeled bucket can still reach a
        # perfect grid fit only if the two singleton docs separate; either
        # way the row must score against the folded labels without error.
        assert rows[0].v is not None
