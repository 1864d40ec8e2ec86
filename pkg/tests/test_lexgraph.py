from __future__ import annotations

import textwrap

import numpy as np
import pytest

from secdedup.errors import EmptyCorpus, MalformedGraph
from secdedup.similarity.lexgraph import (
    LexicalGraph,
    graph_similarity,
    load_lexical_graph,
    word_similarity,
)
from secdedup.similarity.matrix import validate_matrix
from secdedup.similarity.preprocess import idf_weights, tokenize_corpus

from .conftest import BENCH_DIR, docs_from_texts
from .oracles import floyd_warshall


def tsv_graph(tmp_path, content: str):
    path = tmp_path / "graph.tsv"
    path.write_text(textwrap.dedent(content), encoding="utf-8")
    return load_lexical_graph(path)


CHAIN = """\
    s-animal\tanimal,creature
    s-canine\tdog,hound\ts-animal
    s-feline\tcat\ts-animal
    s-puppy\tpuppy\ts-canine
    """


class TestTsvLoading:
    def test_lemmas_and_edges(self, tmp_path):
        graph = tsv_graph(tmp_path, CHAIN)
        assert graph.synsets_of("dog") == frozenset({"s-canine"})
        assert graph.synsets_of("creature") == frozenset({"s-animal"})
        assert graph.hypernym_edges["s-puppy"] == ("s-canine",)

    def test_comments_and_blanks_skipped(self, tmp_path):
        graph = tsv_graph(tmp_path, "# comment\n\ns-a\tword\n")
        assert graph.synsets_of("word") == frozenset({"s-a"})

    def test_duplicate_synset_rejected(self, tmp_path):
        with pytest.raises(MalformedGraph):
            tsv_graph(tmp_path, "s-a\tone\ns-a\ttwo\n")

    def test_edge_to_missing_synset_rejected(self, tmp_path):
        with pytest.raises(MalformedGraph):
            tsv_graph(tmp_path, "s-a\tone\ts-ghost\n")

    def test_wrong_column_count_rejected(self, tmp_path):
        with pytest.raises(MalformedGraph):
            tsv_graph(tmp_path, "s-a\tone\ttwo\tthree\n")

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(MalformedGraph):
            load_lexical_graph(tmp_path / "absent.tsv")


class TestWordSimilarity:
    def test_identical_words_score_one_even_out_of_vocabulary(self, tmp_path):
        graph = tsv_graph(tmp_path, CHAIN)
        assert word_similarity(graph, "zzzqqq", "zzzqqq") == 1.0

    def test_same_synset_scores_one(self, tmp_path):
        graph = tsv_graph(tmp_path, CHAIN)
        assert word_similarity(graph, "dog", "hound") == 1.0

    def test_one_hop_scores_half(self, tmp_path):
        graph = tsv_graph(tmp_path, CHAIN)
        assert word_similarity(graph, "dog", "animal") == 0.5
        assert word_similarity(graph, "puppy", "dog") == 0.5

    def test_two_hops_score_third(self, tmp_path):
        graph = tsv_graph(tmp_path, CHAIN)
        assert word_similarity(graph, "dog", "cat") == pytest.approx(1 / 3)

    def test_out_of_vocabulary_scores_zero(self, tmp_path):
        graph = tsv_graph(tmp_path, CHAIN)
        assert word_similarity(graph, "dog", "spanner") == 0.0

    def test_disconnected_synsets_score_zero(self, tmp_path):
        graph = tsv_graph(tmp_path, CHAIN + "s-tool\tspanner\n")
        assert word_similarity(graph, "dog", "spanner") == 0.0

    def test_distances_match_floyd_warshall_oracle(self, tmp_path):
        graph = tsv_graph(tmp_path, CHAIN + "s-kitten\tkitten\ts-feline\n")
        nodes = sorted(graph.synsets)
        edges = [(a, b) for a, targets in graph.hypernym_edges.items() for b in targets]
        oracle = floyd_warshall(nodes, edges)
        for a in nodes:
            for b in nodes:
                expected = oracle.get((a, b))
                got = graph.shortest_distance(frozenset({a}), frozenset({b}))
                assert got == expected, (a, b)

    def test_multi_synset_word_takes_best_path(self, tmp_path):
        # "bat" is both an animal and a club; club-side is closer to "stick"
        graph = tsv_graph(tmp_path, """\
            s-animal\tanimal
            s-bat-animal\tbat\ts-animal
            s-stick\tstick
            s-bat-club\tbat,club\ts-stick
            """)
        assert word_similarity(graph, "bat", "stick") == 0.5


class TestGraphSimilarity:
    def build(self, tmp_path, texts, graph_content=CHAIN):
        graph = tsv_graph(tmp_path, graph_content)
        corpus = tokenize_corpus(docs_from_texts(*texts))
        idf = idf_weights(corpus)
        return graph_similarity(corpus, graph, idf)

    def test_identical_documents_score_one(self, tmp_path):
        matrix = self.build(tmp_path, ["stray dog sighted", "stray dog sighted", "lost cat"])
        assert matrix.scores[0, 1] == 1.0

    def test_synonym_swap_keeps_score_high(self, tmp_path):
        # hound <-> dog sit in one synset: only idf weighting separates the docs
        matrix = self.build(tmp_path, [
            "stray dog sighted near warehouse",
            "stray hound sighted near warehouse",
            "unrelated spanner inventory",
        ])
        assert matrix.scores[0, 1] == 1.0

    def test_bidirectional_average(self, tmp_path):
        # doc0 tokens all match doc1; doc1 has an extra unmatched token, so
        # the directed scores differ and the result is their mean
        texts = ["alpha beta", "alpha beta gamma", "delta filler"]
        matrix = self.build(tmp_path, texts)
        idf = idf_weights(tokenize_corpus(docs_from_texts(*texts)))
        forward = 1.0  # alpha, beta both present in doc1
        weights = [idf["alpha"], idf["beta"], idf["gamma"]]
        backward = (weights[0] + weights[1]) / sum(weights)
        expected = 0.5 * (forward + backward)
        assert matrix.scores[0, 1] == pytest.approx(expected)

    def test_empty_document_scores_zero(self, tmp_path):
        matrix = self.build(tmp_path, ["dog", ""])
        assert matrix.scores[0, 1] == 0.0

    def test_zero_idf_falls_back_to_plain_mean(self, tmp_path):
        # "dog" appears in every document so its idf is 0; the doc1 -> doc0
        # direction has no weight left and should fall back to a plain mean
        matrix = self.build(tmp_path, ["dog cat", "dog"])
        forward = 1 / 3  # cat vs dog: two hops through the animal root
        backward = 1.0
        assert matrix.scores[0, 1] == pytest.approx(0.5 * (forward + backward))

    def test_empty_corpus_rejected(self, tmp_path):
        graph = tsv_graph(tmp_path, CHAIN)
        with pytest.raises(EmptyCorpus):
            graph_similarity([], graph, {})

    def test_matrix_contract(self, tmp_path):
        matrix = self.build(tmp_path, ["dog cat", "hound", "animal creature", ""])
        validate_matrix(matrix)

    def test_engine_tag(self, tmp_path):
        assert self.build(tmp_path, ["dog"]).engine_tag == "graph"


class TestBundledGraph:
    def test_loads_and_contains_design_synonyms(self):
        graph = load_lexical_graph(BENCH_DIR / "lexgraph.tsv")
        for a, b in [("mitigate", "reduce"), ("set", "supply"),
                     ("loaded", "fetched"), ("restrict", "confine")]:
            assert word_similarity(graph, a, b) == 1.0, (a, b)

    def test_taxonomy_distances(self):
        graph = load_lexical_graph(BENCH_DIR / "lexgraph.tsv")
        assert word_similarity(graph, "injection", "attack") == 0.5
        assert word_similarity(graph, "injection", "threat") == pytest.approx(1 / 3)
        assert word_similarity(graph, "injection", "forgery") == pytest.approx(1 / 3)


class TestWordNetDirectoryLoading:
    def write_wordnet(self, tmp_path):
        # two noun synsets, dog -> canine hypernym, plus a verb file entry
        noun_lines = [
            "  1 this is a license header line",
            "00001000 05 n 02 dog 0 domestic_dog 0 001 @ 00002000 n 0000 | a dog",
            "00002000 05 n 01 canine 0 000 | canine animals",
        ]
        verb_lines = [
            "  1 license",
            "00003000 30 v 01 run 0 000 | move fast",
        ]
        directory = tmp_path / "dict"
        directory.mkdir()
        (directory / "data.noun").write_text("\n".join(noun_lines), encoding="utf-8")
        (directory / "data.verb").write_text("\n".join(verb_lines), encoding="utf-8")
        return directory

    def test_parses_synsets_lemmas_and_hypernyms(self, tmp_path):
        graph = load_lexical_graph(self.write_wordnet(tmp_path))
        assert graph.synsets_of("dog") == frozenset({"00001000-n"})
        assert graph.synsets_of("domestic_dog") == frozenset({"00001000-n"})
        assert graph.hypernym_edges["00001000-n"] == ("00002000-n",)
        assert word_similarity(graph, "dog", "canine") == 0.5
        assert graph.synsets_of("run") == frozenset({"00003000-v"})

    def test_empty_directory_rejected(self, tmp_path):
        empty = tmp_path / "dict"
        empty.mkdir()
        with pytest.raises(MalformedGraph):
            load_lexical_graph(empty)

    def test_malformed_data_line_rejected(self, tmp_path):
        directory = tmp_path / "dict"
        directory.mkdir()
        (directory / "data.noun").write_text("00001000 05 n ZZ dog", encoding="utf-8")
        with pytest.raises(MalformedGraph):
            load_lexical_graph(directory)
