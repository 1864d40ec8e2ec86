from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secdedup.errors import EmptyCorpus, RankTooLarge
from secdedup.similarity.lsi import (
    default_rank,
    lsi_similarity,
    tfidf_doc_term_matrix,
)
from secdedup.similarity.matrix import validate_matrix
from secdedup.similarity.preprocess import tokenize_corpus

from .conftest import docs_from_texts
from .oracles import brute_force_tfidf_cosine

WORDS = ["policy", "header", "script", "query", "token", "overflow",
         "request", "cookie", "archive", "handler"]

text_strategy = st.lists(st.sampled_from(WORDS), min_size=0, max_size=12).map(" ".join)


def full_rank(corpus) -> int:
    vocab = {t for doc in corpus for t in doc.tokens}
    return max(1, min(len(corpus), len(vocab)))


class TestDefaultRank:
    def test_caps_at_300(self):
        assert default_rank(2000, 50000) == 300

    def test_bounded_by_docs_minus_one(self):
        assert default_rank(5, 50000) == 4

    def test_bounded_by_vocabulary(self):
        assert default_rank(500, 7) == 7

    def test_never_below_one(self):
        assert default_rank(1, 0) == 1


class TestTfidfMatrix:
    def test_values_are_tf_times_idf(self):
        corpus = tokenize_corpus(docs_from_texts("policy policy header", "header"))
        matrix, vocabulary = tfidf_doc_term_matrix(corpus)
        dense = matrix.toarray()
        policy = vocabulary.index("policy")
        header = vocabulary.index("header")
        assert dense[0, policy] == pytest.approx(2 * np.log(2 / 1))
        # "header" appears in both documents: idf 0
        assert dense[0, header] == 0.0
        assert dense[1, header] == 0.0

    def test_vocabulary_sorted(self):
        corpus = tokenize_corpus(docs_from_texts("zeta alpha", "midway"))
        _, vocabulary = tfidf_doc_term_matrix(corpus)
        assert vocabulary == sorted(vocabulary)


class TestLsiAgainstOracle:
    def test_full_rank_equals_brute_force_cosine(self):
        texts = [
            "buffer overflow in the archive handler",
            "archive handler overflow corrupts the heap",
            "missing policy header on every response",
            "response header policy missing",
            "token forged by the session middleware",
        ]
        docs = docs_from_texts(*texts)
        corpus = tokenize_corpus(docs)
        matrix = lsi_similarity(corpus, k=full_rank(corpus))
        oracle = np.array(brute_force_tfidf_cosine([d.tokens for d in corpus]))
        assert np.abs(matrix.scores - oracle).max() <= 1e-6

    @settings(max_examples=120, deadline=None)
    @given(st.lists(text_strategy, min_size=1, max_size=8))
    def test_full_rank_equivalence_property(self, texts):
        corpus = tokenize_corpus(docs_from_texts(*texts))
        matrix = lsi_similarity(corpus, k=full_rank(corpus))
        oracle = np.array(brute_force_tfidf_cosine([d.tokens for d in corpus]))
        assert np.abs(matrix.scores - oracle).max() <= 1e-6

    @settings(max_examples=60, deadline=None)
    @given(st.lists(text_strategy, min_size=1, max_size=8), st.integers(1, 8))
    def test_matrix_contract_at_any_rank(self, texts, k):
        corpus = tokenize_corpus(docs_from_texts(*texts))
        vocab = {t for doc in corpus for t in doc.tokens}
        if vocab:
            k = min(k, len(corpus), len(vocab))
        matrix = lsi_similarity(corpus, k=k)
        validate_matrix(matrix)


class TestLsiEdges:
    def test_identical_documents_score_one(self):
        corpus = tokenize_corpus(docs_from_texts(
            "heap overflow libfoo", "heap overflow libfoo", "unrelated filler entry"
        ))
        matrix = lsi_similarity(corpus, k=full_rank(corpus))
        assert matrix.scores[0, 1] == pytest.approx(1.0, abs=1e-9)

    def test_all_terms_everywhere_scores_zero(self):
        # every term appears in every document, so idf flattens both vectors
        # to zero and the zero-vector convention applies, same as the oracle
        corpus = tokenize_corpus(docs_from_texts("alpha beta", "alpha beta"))
        matrix = lsi_similarity(corpus, k=1)
        assert matrix.scores[0, 1] == 0.0

    def test_disjoint_documents_score_zero_at_full_rank(self):
        corpus = tokenize_corpus(docs_from_texts("alpha beta", "gamma delta"))
        matrix = lsi_similarity(corpus, k=full_rank(corpus))
        assert matrix.scores[0, 1] == pytest.approx(0.0, abs=1e-9)

    def test_empty_corpus_rejected(self):
        with pytest.raises(EmptyCorpus):
            lsi_similarity([], k=1)

    def test_rank_too_large_rejected(self):
        corpus = tokenize_corpus(docs_from_texts("one token", "two token"))
        with pytest.raises(RankTooLarge):
            lsi_similarity(corpus, k=50)

    def test_rank_zero_rejected(self):
        corpus = tokenize_corpus(docs_from_texts("one token", "two token"))
        with pytest.raises(RankTooLarge):
            lsi_similarity(corpus, k=0)

    def test_all_empty_documents_identity_matrix(self):
        corpus = tokenize_corpus(docs_from_texts("", "the a of", ""))
        matrix = lsi_similarity(corpus, k=3)
        assert np.array_equal(matrix.scores, np.eye(3))

    def test_empty_doc_scores_zero_against_everything(self):
        corpus = tokenize_corpus(docs_from_texts("alpha beta", ""))
        matrix = lsi_similarity(corpus, k=1)
        assert matrix.scores[0, 1] == 0.0
        assert matrix.scores[1, 1] == 1.0

    def test_engine_tag_carries_rank(self):
        corpus = tokenize_corpus(docs_from_texts("alpha", "beta"))
        assert lsi_similarity(corpus, k=2).engine_tag == "lsi(k=2)"

    def test_truncation_changes_scores_but_keeps_contract(self):
        texts = [f"word{i} word{(i + 1) % 6} filler{i % 3}" for i in range(6)]
        corpus = tokenize_corpus(docs_from_texts(*texts))
        low = lsi_similarity(corpus, k=1)
        high = lsi_similarity(corpus, k=full_rank(corpus))
        validate_matrix(low)
        validate_matrix(high)
        assert not np.allclose(low.scores, high.scores)

    def test_deterministic_across_calls(self):
        texts = ["policy header missing", "script injection found", "policy script"]
        corpus = tokenize_corpus(docs_from_texts(*texts))
        a = lsi_similarity(corpus, k=2)
        b = lsi_similarity(corpus, k=2)
        assert np.array_equal(a.scores, b.scores)
