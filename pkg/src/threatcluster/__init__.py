"""threatcluster: cluster security text corpora and score against ground truth."""

from .cluster import (
    NOISE,
    Clustering,
    DbscanParams,
    GridSearchResult,
    KMeansParams,
    auto_kmeans,
    dbscan,
    dbscan_grid,
    kmeans,
    noise_to_singletons,
    optics,
    silhouette,
)
from .corpus import (
    UNLABELED,
    CorpusStats,
    Document,
    LabeledCorpus,
    corpus_stats,
    load_jsonl,
    singletons_to_unlabeled,
    subsample,
)
from .dense_io import VectorFileHeader, read_raw_vectors, read_vectors, write_vectors
from .distance import METRICS, DistanceMatrix, distance, pairwise
from .harness import (
    CLUSTERERS,
    BenchmarkRecord,
    RunConfig,
    embed_corpus,
    render_benchmark_csv,
    render_report,
    parse_report_csv,
    run_combination,
    run_matrix,
    run_matrix_full,
    scalability_benchmark,
)
from .metrics import (
    ClusterScores,
    ContingencyTable,
    EvalRow,
    contingency,
    homogeneity_completeness_v,
    reduction,
    score,
    v_measure,
)
from .preprocess import default_stopwords, load_stopwords, ngrams, preprocess, remove_stopwords, stem, tokenize
from .tfidf import DENSE_KINDS, KINDS, TFIDF_KINDS, EmbeddingMatrix, Vocabulary, fit_vocabulary, transform

__version__ = "0.1.0"
