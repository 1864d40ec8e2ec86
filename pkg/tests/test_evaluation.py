from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secdedup.clustering import ClusterSet
from secdedup.corpus import CorpusDocument
from secdedup.errors import UniverseMismatch
from secdedup.evaluation import (
    DEFAULT_THRESHOLDS,
    evaluate,
    export_plot_data,
    parse_threshold_grid,
    summary_payload,
    sweep,
)
from secdedup.similarity.matrix import SimilarityMatrix, finalize_scores

from .oracles import brute_force_metrics


def cluster_set(groups, origin="predicted", threshold=None):
    return ClusterSet(
        clusters=frozenset(frozenset(g) for g in groups),
        origin=origin,
        threshold=threshold,
    )


def random_partition(rng, items):
    """Split items into a random number of non-empty groups."""
    items = list(items)
    rng.shuffle(items)
    if not items:
        return []
    cuts = sorted(rng.sample(range(1, len(items)), k=rng.randint(0, min(6, len(items) - 1))))
    groups, start = [], 0
    for cut in cuts + [len(items)]:
        groups.append(items[start:cut])
        start = cut
    return [g for g in groups if g]


class TestEvaluate:
    def test_hand_worked_contingency(self):
        truth = cluster_set([[1, 2], [3], [4, 5]], origin="ground_truth")
        predicted = cluster_set([[1, 2], [3, 4], [5]])
        # exact matches: {1,2} only; {3,4} and {5} are wrong splits
        result = evaluate(predicted, truth)
        assert (result.tp, result.fp, result.fn) == (1, 2, 2)
        assert result.precision == pytest.approx(1 / 3)
        assert result.recall == pytest.approx(1 / 3)
        assert result.f_score == pytest.approx(2 * 1 / (2 * 1 + 2 + 2))

    def test_perfect_prediction(self):
        truth = cluster_set([[1, 2], [3]], origin="ground_truth")
        result = evaluate(cluster_set([[2, 1], [3]]), truth)
        assert (result.tp, result.fp, result.fn) == (2, 0, 0)
        assert result.f_score == 1.0

    def test_partial_overlap_earns_nothing(self):
        truth = cluster_set([[1, 2, 3]], origin="ground_truth")
        result = evaluate(cluster_set([[1, 2], [3]]), truth)
        assert result.tp == 0

    def test_universe_mismatch_missing_and_extra(self):
        truth = cluster_set([[1, 2]], origin="ground_truth")
        with pytest.raises(UniverseMismatch):
            evaluate(cluster_set([[1]]), truth)
        with pytest.raises(UniverseMismatch):
            evaluate(cluster_set([[1, 2, 3]]), truth)

    def test_threshold_defaults_from_predicted_set(self):
        truth = cluster_set([[1]], origin="ground_truth")
        result = evaluate(cluster_set([[1]], threshold=0.45), truth)
        assert result.threshold == 0.45

    @settings(max_examples=150)
    @given(st.integers(min_value=1, max_value=60), st.integers(min_value=0, max_value=9999))
    def test_counts_match_brute_force_oracle(self, n, seed):
        import random

        rng = random.Random(seed)
        findings = list(range(1, n + 1))
        predicted = cluster_set(random_partition(rng, findings))
        truth = cluster_set(random_partition(rng, findings), origin="ground_truth")
        result = evaluate(predicted, truth)
        assert (result.tp, result.fp, result.fn) == brute_force_metrics(
            predicted.clusters, truth.clusters
        )


class TestSweep:
    def build_inputs(self):
        corpus = [
            CorpusDocument(doc_id=i, finding_ids=frozenset({i + 1}), text="x")
            for i in range(4)
        ]
        scores = finalize_scores(np.array([
            [1.0, 0.9, 0.2, 0.1],
            [0.9, 1.0, 0.2, 0.1],
            [0.2, 0.2, 1.0, 0.6],
            [0.1, 0.1, 0.6, 1.0],
        ]))
        matrix = SimilarityMatrix(n=4, scores=scores, engine_tag="lsi(k=3)", corpus_kind="SAST_D")
        truth = cluster_set([[1, 2], [3, 4]], origin="ground_truth")
        return matrix, corpus, truth

    def test_rows_cover_grid_and_best_is_max_f(self):
        matrix, corpus, truth = self.build_inputs()
        result = sweep(matrix, corpus, truth, thresholds=(0.5, 0.8, 0.95))
        assert [r.threshold for r in result.rows] == [0.5, 0.8, 0.95]
        # 0.5 merges both pairs (F=1); 0.8 keeps only the first pair, leaving
        # two singleton false positives (tp=1, fp=2, fn=1 -> F=0.4); 0.95 none
        assert [r.f_score for r in result.rows] == pytest.approx([1.0, 0.4, 0.0])
        assert result.best == 0
        assert result.best_row.f_score == 1.0

    def test_best_tie_break_prefers_first_threshold(self):
        matrix, corpus, truth = self.build_inputs()
        result = sweep(matrix, corpus, truth, thresholds=(0.3, 0.5))
        assert [r.f_score for r in result.rows] == pytest.approx([1.0, 1.0])
        assert result.best == 0

    def test_rows_carry_engine_and_corpus_tags(self):
        matrix, corpus, truth = self.build_inputs()
        result = sweep(matrix, corpus, truth, thresholds=(0.5,))
        assert result.rows[0].engine_tag == "lsi(k=3)"
        assert result.rows[0].corpus_kind == "SAST_D"

    def test_default_grid(self):
        assert DEFAULT_THRESHOLDS[0] == 0.10
        assert DEFAULT_THRESHOLDS[-1] == 0.95
        assert len(DEFAULT_THRESHOLDS) == 18
        steps = {
            round(b - a, 10) for a, b in zip(DEFAULT_THRESHOLDS, DEFAULT_THRESHOLDS[1:])
        }
        assert steps == {0.05}

    def test_empty_grid_rejected(self):
        matrix, corpus, truth = self.build_inputs()
        with pytest.raises(ValueError):
            sweep(matrix, corpus, truth, thresholds=())

    def test_unsorted_grid_rejected(self):
        matrix, corpus, truth = self.build_inputs()
        with pytest.raises(ValueError):
            sweep(matrix, corpus, truth, thresholds=(0.5, 0.3))

    def test_out_of_range_grid_rejected(self):
        matrix, corpus, truth = self.build_inputs()
        with pytest.raises(ValueError):
            sweep(matrix, corpus, truth, thresholds=(0.5, 1.5))


class TestParseThresholdGrid:
    def test_inclusive_endpoints(self):
        assert parse_threshold_grid("0.1:0.3:0.1") == (0.1, 0.2, 0.3)

    def test_single_point(self):
        assert parse_threshold_grid("0.5:0.5:0.05") == (0.5,)

    def test_default_grid_expression(self):
        assert parse_threshold_grid("0.10:0.95:0.05") == DEFAULT_THRESHOLDS

    @pytest.mark.parametrize("spec", ["0.1:0.9", "a:b:c", "0.9:0.1:0.1", "0.1:0.9:0"])
    def test_malformed_specs_rejected(self, spec):
        with pytest.raises(ValueError):
            parse_threshold_grid(spec)


class TestExportAndSummary:
    def run_sweep(self):
        corpus = [
            CorpusDocument(doc_id=0, finding_ids=frozenset({1}), text="x"),
            CorpusDocument(doc_id=1, finding_ids=frozenset({2}), text="y"),
        ]
        scores = finalize_scores(np.array([[1.0, 0.4], [0.4, 1.0]]))
        matrix = SimilarityMatrix(n=2, scores=scores, engine_tag="graph", corpus_kind="DAST_NDS")
        truth = cluster_set([[1, 2]], origin="ground_truth")
        return sweep(matrix, corpus, truth, thresholds=(0.3, 0.6))

    def test_csv_layout(self, tmp_path):
        path = tmp_path / "plot.csv"
        export_plot_data([self.run_sweep()], path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "engine_tag,corpus_kind,threshold,precision,recall,f_score"
        assert lines[1] == "graph,DAST_NDS,0.3,1.000000,1.000000,1.000000"
        assert lines[2] == "graph,DAST_NDS,0.6,0.000000,0.000000,0.000000"

    def test_export_nothing_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            export_plot_data([], tmp_path / "plot.csv")

    def test_summary_lists_best_row_per_sweep(self):
        payload = summary_payload([self.run_sweep()])
        assert payload == {
            "results": [
                {
                    "engine_tag": "graph",
                    "corpus_kind": "DAST_NDS",
                    "best_threshold": 0.3,
                    "f_score": 1.0,
                    "precision": 1.0,
                    "recall": 1.0,
                    "tp": 1,
                    "fp": 0,
                    "fn": 0,
                }
            ]
        }
