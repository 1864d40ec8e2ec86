"""Latent semantic indexing over TF-IDF finding strings.

The term-document matrix uses raw term counts scaled by idf = ln(n / df)
(terms present in every document weigh 0). Documents are projected onto the
top-k singular directions and scored by cosine, clamped to [0, 1].

The truncated SVD is obtained from an eigendecomposition of the document
Gram matrix: for G = A^T A with eigenpairs (lambda_i, v_i), the projected
document coordinates are v_i * sqrt(lambda_i). At full rank the projected
inner products reproduce G exactly, so full-rank LSI equals plain TF-IDF
cosine; LAPACK's eigh keeps the result deterministic for identical input.
Dense n x n work is fine at the desk scale this runs at (n <= ~1400).
"""

from __future__ import annotations

from collections import Counter

import numpy as np
from scipy import sparse

from ..errors import EmptyCorpus, RankTooLarge
from .matrix import SimilarityMatrix, finalize_scores
from .preprocess import TokenizedDoc, idf_weights

DEFAULT_MAX_RANK = 300


def default_rank(n_docs: int, vocab_size: int) -> int:
    """min(300, n-1) bounded by the vocabulary, never below 1."""
    return max(1, min(DEFAULT_MAX_RANK, n_docs - 1, vocab_size))


def tfidf_doc_term_matrix(
    corpus: list[TokenizedDoc],
) -> tuple[sparse.csr_matrix, list[str]]:
    """Rows are documents, columns terms, values tf * idf."""
    idf = idf_weights(corpus)
    vocabulary = sorted(idf)
    column = {term: j for j, term in enumerate(vocabulary)}
    rows: list[int] = []
    cols: list[int] = []
    values: list[float] = []
    for i, doc in enumerate(corpus):
        for term, count in Counter(doc.tokens).items():
            rows.append(i)
            cols.append(column[term])
            values.append(count * idf[term])
    matrix = sparse.csr_matrix(
        (values, (rows, cols)), shape=(len(corpus), len(vocabulary)), dtype=np.float64
    )
    return matrix, vocabulary


def cosine_from_vectors(vectors: np.ndarray) -> np.ndarray:
    """Pairwise cosine of row vectors; zero rows score 0 everywhere (1 on the diagonal)."""
    norms = np.linalg.norm(vectors, axis=1)
    safe = np.where(norms > 0.0, norms, 1.0)
    normalized = vectors / safe[:, None]
    scores = normalized @ normalized.T
    zero = norms == 0.0
    scores[zero, :] = 0.0
    scores[:, zero] = 0.0
    return finalize_scores(scores)


def lsi_similarity(
    corpus: list[TokenizedDoc], k: int, corpus_kind: str = ""
) -> SimilarityMatrix:
    """Pairwise LSI cosine similarity at rank k."""
    n = len(corpus)
    if n == 0:
        raise EmptyCorpus("lsi_similarity needs at least one document")

    doc_term, vocabulary = tfidf_doc_term_matrix(corpus)
    vocab_size = len(vocabulary)

    if vocab_size == 0:
        # every document tokenized to nothing: all zero vectors
        scores = np.zeros((n, n))
        np.fill_diagonal(scores, 1.0)
        return SimilarityMatrix(n=n, scores=scores, engine_tag=f"lsi(k={k})", corpus_kind=corpus_kind)

    if k < 1 or k > min(vocab_size, n):
        raise RankTooLarge(f"k={k} outside 1..min(vocab={vocab_size}, n={n})")

    gram = (doc_term @ doc_term.T).toarray()
    eigenvalues, eigenvectors = np.linalg.eigh(gram)
    # ascending order; keep the top k and clamp tiny negatives from rounding
    top = np.clip(eigenvalues[-k:], 0.0, None)
    doc_vectors = eigenvectors[:, -k:] * np.sqrt(top)[None, :]
    # a document with an all-zero tf-idf row must keep an exactly-zero vector;
    # eigh noise would otherwise get normalized into an arbitrary direction
    doc_vectors[np.diag(gram) == 0.0, :] = 0.0

    scores = cosine_from_vectors(doc_vectors)
    return SimilarityMatrix(
        n=n, scores=scores, engine_tag=f"lsi(k={k})", corpus_kind=corpus_kind
    )
