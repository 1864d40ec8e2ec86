"""Pairwise semantic-similarity engines over corpus documents.

Three interchangeable engines produce the same SimilarityMatrix contract:

* lsi_similarity        - TF-IDF + truncated SVD (corpus-based)
* graph_similarity      - lexical-graph path similarity (knowledge-based)
* embedding_similarity  - cosine over externally provided sentence vectors
"""

from .matrix import SimilarityMatrix, load_matrix, save_matrix, validate_matrix
from .preprocess import STOPWORDS, TokenizedDoc, idf_weights, tokenize, tokenize_corpus
from .lsi import lsi_similarity
from .lexgraph import LexicalGraph, graph_similarity, load_lexical_graph
from .embedding import (
    EmbeddingSet,
    embedding_similarity,
    fetch_embeddings,
    load_embeddings,
    save_embeddings,
)

__all__ = [
    "SimilarityMatrix",
    "validate_matrix",
    "load_matrix",
    "save_matrix",
    "STOPWORDS",
    "TokenizedDoc",
    "tokenize",
    "tokenize_corpus",
    "idf_weights",
    "lsi_similarity",
    "LexicalGraph",
    "load_lexical_graph",
    "graph_similarity",
    "EmbeddingSet",
    "load_embeddings",
    "save_embeddings",
    "fetch_embeddings",
    "embedding_similarity",
]
