"""Command-line surface: stats, embed, run, bench.

Exit codes: 0 success, 2 usage or input error, 1 internal error.  All
commands honor --seed and are reproducible byte for byte apart from timing
columns.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from . import harness
from .corpus import corpus_stats, load_jsonl, subsample
from .dense_io import VectorFileHeader, write_vectors
from .harness import RunConfig, render_benchmark_csv, run_matrix_full, scalability_benchmark, write_run_outputs
from .preprocess import default_stopwords, load_stopwords, preprocess
from .tfidf import DENSE_KINDS, TFIDF_KINDS, fit_vocabulary, transform

_CONFIG_KEYS = {
    "corpus",
    "embeddings",
    "distances",
    "clusterers",
    "beta",
    "seed",
    "threshold",
    "workers",
    "outdir",
    "stopwords",
    "vectors_doc2vec",
    "vectors_sbert_h",
    "vectors_sbert_t",
    "vectors_sbert_ht",
}


class InputError(Exception):
    """User-facing problem with arguments or input files (exit code 2)."""


def parse_config(path: str | Path) -> RunConfig:
    """Parse the flat key=value run configuration.

    Lines are `key = value`; '#' starts a comment; list values are
    comma-separated; string values may be double-quoted.
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if value.startswith('"') and value.endswith('"') and len(value) >= 2:
            value = value[1:-1]
        if key not in _CONFIG_KEYS:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise InputError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value
    if "corpus" not in values:
        raise InputError(f"{path}: missing required key 'corpus'")

    def split_list(key: str) -> tuple[str, ...] | None:
        if key not in values:
            return None
        return tuple(x.strip() for x in values[key].split(",") if x.strip())

    vector_files = {
        kind: values[f"vectors_{kind}"] for kind in DENSE_KINDS if f"vectors_{kind}" in values
    }
    embeddings = split_list("embeddings")
    if embeddings is None:
        embeddings = TFIDF_KINDS + tuple(k for k in DENSE_KINDS if k in vector_files)
    try:
        return RunConfig(
            corpus=values["corpus"],
            embeddings=embeddings,
            metrics=split_list("distances") or harness.METRICS,
            clusterers=split_list("clusterers") or harness.CLUSTERERS,
            vector_files=vector_files,
            beta=float(values.get("beta", "1.0")),
            seed=int(values.get("seed", "0")),
            threshold=float(values.get("threshold", "0.4")),
            workers=int(values["workers"]) if "workers" in values else None,
            outdir=values.get("outdir", "out"),
            stopwords=values.get("stopwords"),
        )
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _parse_sizes(spec: str) -> list[int]:
    """Size list: either one integer or start:stop:step (inclusive stop)."""
    try:
        if ":" in spec:
            start_s, stop_s, step_s = spec.split(":")
            start, stop, step = int(start_s), int(stop_s), int(step_s)
            if step <= 0 or start <= 0 or stop < start:
                raise ValueError
            return list(range(start, stop + 1, step))
        size = int(spec)
        if size <= 0:
            raise ValueError
        return [size]
    except ValueError:
        raise InputError(f"malformed size range {spec!r} (expected N or start:stop:step)") from None


def _stoplist(args) -> set[str]:
    if getattr(args, "stopwords", None):
        return load_stopwords(args.stopwords)
    return default_stopwords()


def cmd_stats(args) -> int:
    stats = corpus_stats(load_jsonl(args.corpus))
    print(f"size      {stats.size}")
    if stats.size:
        print(f"mean_len  {stats.mean_len:.2f}")
        print(f"median    {stats.median_len}")
        print(f"min_len   {stats.min_len}")
        print(f"max_len   {stats.max_len}")
    print(f"classes   {stats.n_classes}")
    return 0


def cmd_embed(args) -> int:
    if args.kind not in TFIDF_KINDS:
        raise InputError(
            f"kind {args.kind!r} is not produced here; dense kinds come from the embedder sidecar"
        )
    corpus = load_jsonl(args.corpus)
    stoplist = _stoplist(args)
    tokens = [preprocess(doc, stoplist) for doc in corpus]
    vocab = fit_vocabulary(tokens, ngram_max=int(args.kind[-1]))
    matrix = transform(tokens, vocab)
    header = VectorFileHeader(dim=matrix.dim, kind=args.kind, model_name="native", count=matrix.n_rows)
    dense = matrix.toarray()
    write_vectors(args.out, header, zip(corpus.ids(), dense))
    print(f"{matrix.n_rows} x {matrix.dim}")
    return 0


def cmd_run(args) -> int:
    cfg = parse_config(args.config)
    if args.outdir:
        cfg.outdir = args.outdir
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    if args.beta is not None:
        cfg.beta = args.beta
    if not Path(cfg.corpus).exists():
        raise InputError(f"corpus file not found: {cfg.corpus}")
    corpus = load_jsonl(cfg.corpus)
    rows, assignments = run_matrix_full(cfg, corpus)
    write_run_outputs(rows, assignments, corpus.ids(), cfg.outdir, cfg.threshold)
    failures = sum(1 for r in rows if r.error is not None)
    print(f"{len(rows)} combinations ({failures} failed); reports in {cfg.outdir}")
    return 0


def cmd_bench(args) -> int:
    sizes = _parse_sizes(args.sizes)
    corpus = load_jsonl(args.corpus)
    if len(corpus) == 0:
        raise InputError("benchmark needs a nonempty corpus")
    clusterers = tuple(x.strip() for x in args.clusterers.split(",") if x.strip())
    for clus in clusterers:
        if clus not in harness.CLUSTERERS:
            raise InputError(f"unknown clusterer {clus!r}")
    records = scalability_benchmark(
        corpus, clusterers, sizes, seed=args.seed or 0, beta=args.beta or 1.0
    )
    text = render_benchmark_csv(records)
    Path(args.out).write_text(text, encoding="utf-8")
    print(f"{len(records)} records in {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    common.add_argument("--workers", type=int, default=None, help="parallel workers")
    common.add_argument("--beta", type=float, default=None, help="V-measure beta (default 1)")

    parser = argparse.ArgumentParser(prog="threatcluster", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", parents=[common], help="corpus structural statistics")
    p_stats.add_argument("corpus")
    p_stats.set_defaults(func=cmd_stats)

    p_embed = sub.add_parser("embed", parents=[common], help="write a TF-IDF matrix artifact")
    p_embed.add_argument("corpus")
    p_embed.add_argument("--kind", required=True, help="tfidf1 | tfidf2 | tfidf3")
    p_embed.add_argument("--out", required=True)
    p_embed.add_argument("--stopwords", default=None, help="override the packaged stopword list")
    p_embed.set_defaults(func=cmd_embed)

    p_run = sub.add_parser("run", parents=[common], help="run the evaluation matrix")
    p_run.add_argument("config")
    p_run.add_argument("--outdir", default=None)
    p_run.set_defaults(func=cmd_run)

    p_bench = sub.add_parser("bench", parents=[common], help="runtime scalability sweep")
    p_bench.add_argument("corpus")
    p_bench.add_argument("--sizes", required=True, help="N or start:stop:step, e.g. 250:5000:250")
    p_bench.add_argument("--clusterers", default="kmeans,dbscan,optics")
    p_bench.add_argument("--out", default="benchmark.csv")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


def entrypoint() -> None:
    raise SystemExit(main())
