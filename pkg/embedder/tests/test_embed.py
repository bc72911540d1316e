"""Model-dependent checks; skipped when no sentence-transformers model can
be loaded (this sandbox has no model hub access and no local cache)."""

import json

import numpy as np
import pytest

from threatcluster_embedder.cli import main
from threatcluster_embedder.embed import embed_with_sbert
from threatcluster_embedder.truncate import strategy

MODEL = "sentence-transformers/all-MiniLM-L6-v2"


@pytest.fixture(scope="session")
def model_available():
    try:
        from sentence_transformers import SentenceTransformer

        SentenceTransformer(MODEL)
    except Exception as exc:
        pytest.skip(f"no usable sentence-transformers model: {exc}")
    return MODEL


def _write_corpus(path, texts):
    lines = [json.dumps({"id": f"d{i}", "text": t}) for i, t in enumerate(texts)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestEmbedWithModel:
    def test_two_docs_equal_dims(self, model_available):
        rows = [("a", "A short security advisory."), ("b", "Another unrelated text.")]
        vectors = embed_with_sbert(rows, model_available, strategy("head"))
        assert len(vectors) == 2
        assert vectors[0][1].shape == vectors[1][1].shape
        for _, vec in vectors:
            assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-5)

    def test_identical_texts_identical_vectors(self, model_available):
        rows = [("a", "The very same text."), ("b", "The very same text.")]
        vectors = dict(embed_with_sbert(rows, model_available, strategy("head")))
        np.testing.assert_allclose(vectors["a"], vectors["b"], atol=1e-7)

    def test_own_first_sentence_closer_than_unrelated(self, model_available):
        doc = (
            "Attackers exploited a flaw in the gateway appliance to steal session "
            "tokens. The vendor has released patches and urges immediate updates. "
            "Administrators should also revoke active sessions."
        )
        probe = [("full", doc), ("head", doc.split(". ")[0] + "."), ("other", "The recipe needs two cups of flour and fresh basil.")]
        vectors = dict(embed_with_sbert(probe, model_available, strategy("head")))

        def cosine_distance(u, v):
            return 1.0 - float(np.dot(u, v))

        close = cosine_distance(vectors["full"], vectors["head"])
        far = cosine_distance(vectors["full"], vectors["other"])
        assert close < far


class TestCliWithModel:
    def test_end_to_end(self, model_available, tmp_path):
        corpus = _write_corpus(tmp_path / "c.jsonl", ["first document", "second document"])
        out = tmp_path / "v.vec"
        code = main(
            ["--corpus", str(corpus), "--model", model_available, "--strategy", "head_tail", "--out", str(out)]
        )
        assert code == 0
        first = out.read_text().splitlines()[0]
        assert "kind=sbert_ht" in first and "count=2" in first


class TestCliWithoutModel:
    def test_missing_corpus_exit_2(self, tmp_path):
        code = main(["--corpus", str(tmp_path / "no.jsonl"), "--model", "x", "--out", str(tmp_path / "o")])
        assert code == 2

    def test_model_load_failure_exit_1(self, tmp_path):
        corpus = _write_corpus(tmp_path / "c.jsonl", ["text"])
        code = main(
            ["--corpus", str(corpus), "--model", "definitely/not-a-model", "--out", str(tmp_path / "o.vec")]
        )
        assert code == 1

    def test_requires_some_model_flag(self, tmp_path):
        corpus = _write_corpus(tmp_path / "c.jsonl", ["text"])
        assert main(["--corpus", str(corpus), "--out", str(tmp_path / "o.vec")]) == 2

    def test_doc2vec_without_gensim_reports_failure(self, tmp_path):
        corpus = _write_corpus(tmp_path / "c.jsonl", ["text"])
        code = main(
            ["--corpus", str(corpus), "--doc2vec-model", str(tmp_path / "model.d2v"), "--out", str(tmp_path / "o.vec")]
        )
        assert code == 1
