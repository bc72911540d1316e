"""threatcluster-embedder: dense document vectors for the clustering core."""

from .embed import embed_with_doc2vec, embed_with_sbert
from .exchange import read_corpus_jsonl, write_exchange
from .truncate import KIND_BY_STRATEGY, TruncationStrategy, strategy, truncate

__version__ = "0.1.0"
