"""threatcluster-embed: produce dense document vectors in the exchange format.

Exit codes: 0 success, 2 input/usage error, 1 model or inference failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .embed import embed_with_doc2vec, embed_with_sbert
from .exchange import read_corpus_jsonl, write_exchange
from .truncate import strategy


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="threatcluster-embed", description=__doc__)
    parser.add_argument("--corpus", required=True, help="corpus JSONL file")
    parser.add_argument("--out", required=True, help="output exchange file")
    parser.add_argument("--model", help="sentence-transformers model name or path")
    parser.add_argument(
        "--strategy",
        choices=("head", "tail", "head_tail"),
        default="head",
        help="token truncation strategy (default: head)",
    )
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--device", default=None, help="torch device override")
    parser.add_argument("--doc2vec-model", help="pre-trained doc2vec model path (gensim)")
    parser.add_argument("--seed", type=int, default=0, help="doc2vec inference seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.doc2vec_model and not args.model:
        print("error: either --model or --doc2vec-model is required", file=sys.stderr)
        return 2
    if not Path(args.corpus).exists():
        print(f"error: corpus file not found: {args.corpus}", file=sys.stderr)
        return 2
    try:
        rows = read_corpus_jsonl(args.corpus)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.doc2vec_model:
            vectors = embed_with_doc2vec(rows, args.doc2vec_model, seed=args.seed)
            kind = "doc2vec"
            model_name = Path(args.doc2vec_model).name
        else:
            strat = strategy(args.strategy)
            vectors = embed_with_sbert(
                rows, args.model, strat, batch_size=args.batch_size, device=args.device
            )
            kind = strat.vector_kind
            model_name = args.model
    except Exception as exc:
        print(f"error: embedding failed: {exc}", file=sys.stderr)
        return 1
    try:
        write_exchange(args.out, kind, model_name, vectors)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    dim = len(vectors[0][1]) if vectors else 0
    print(f"{len(vectors)} x {dim} -> {args.out}")
    return 0


def entrypoint() -> None:
    raise SystemExit(main())
