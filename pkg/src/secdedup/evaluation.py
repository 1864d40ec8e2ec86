"""Score predicted clusters against ground truth and run threshold sweeps.

A predicted cluster counts as a true positive only when it is set-equal to a
ground-truth cluster; partial overlap earns nothing. Precision, recall, and
F-score follow from the TP/FP/FN counts of that exact matching.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .clustering import ClusterSet, predict_clusters
from .corpus import CorpusDocument
from .errors import UniverseMismatch
from .similarity.matrix import SimilarityMatrix

DEFAULT_THRESHOLDS = tuple(round(0.10 + 0.05 * i, 2) for i in range(18))  # 0.10 .. 0.95


@dataclass(frozen=True)
class EvalResult:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f_score: float
    threshold: float
    engine_tag: str = ""
    corpus_kind: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f_score": self.f_score,
            "threshold": self.threshold,
            "engine_tag": self.engine_tag,
            "corpus_kind": self.corpus_kind,
        }


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[EvalResult, ...]
    best: int

    @property
    def best_row(self) -> EvalResult:
        return self.rows[self.best]


def evaluate(
    predicted: ClusterSet,
    truth: ClusterSet,
    threshold: float | None = None,
    engine_tag: str = "",
    corpus_kind: str = "",
) -> EvalResult:
    """Contingency counts and metrics for exact-set cluster matching."""
    if predicted.universe() != truth.universe():
        missing = truth.universe() - predicted.universe()
        extra = predicted.universe() - truth.universe()
        raise UniverseMismatch(
            f"cluster sets cover different findings (missing {sorted(missing)[:5]}, "
            f"extra {sorted(extra)[:5]})"
        )
    tp = len(predicted.clusters & truth.clusters)
    fp = len(predicted.clusters) - tp
    fn = len(truth.clusters) - tp
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f_score = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn > 0 else 0.0
    if threshold is None:
        threshold = predicted.threshold if predicted.threshold is not None else 0.0
    return EvalResult(
        tp=tp,
        fp=fp,
        fn=fn,
        precision=precision,
        recall=recall,
        f_score=f_score,
        threshold=threshold,
        engine_tag=engine_tag,
        corpus_kind=corpus_kind,
    )


def sweep(
    matrix: SimilarityMatrix,
    corpus: list[CorpusDocument],
    truth: ClusterSet,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
) -> SweepResult:
    """Evaluate the prediction pipeline at each threshold; best row by F-score."""
    if not thresholds:
        raise ValueError("thresholds must be non-empty")
    if any(not 0.0 <= t <= 1.0 for t in thresholds):
        raise ValueError("thresholds must lie in [0, 1]")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be strictly increasing")

    rows = []
    for threshold in thresholds:
        predicted = predict_clusters(matrix, corpus, threshold)
        rows.append(
            evaluate(
                predicted,
                truth,
                threshold=threshold,
                engine_tag=matrix.engine_tag,
                corpus_kind=matrix.corpus_kind,
            )
        )
    best = max(range(len(rows)), key=lambda i: (rows[i].f_score, -i))
    return SweepResult(rows=tuple(rows), best=best)


def parse_threshold_grid(spec: str) -> tuple[float, ...]:
    """Parse "lo:hi:step" into an inclusive, strictly increasing grid."""
    try:
        lo, hi, step = (float(part) for part in spec.split(":"))
    except ValueError as exc:
        raise ValueError(f"bad threshold grid {spec!r}, expected lo:hi:step") from exc
    if step <= 0 or lo > hi:
        raise ValueError(f"bad threshold grid {spec!r}")
    values = []
    current = lo
    while current <= hi + 1e-9:
        values.append(round(current, 10))
        current += step
    return tuple(values)


def export_plot_data(sweeps: Sequence[SweepResult], path: str | Path) -> None:
    """CSV with one row per sweep row: engine, corpus, threshold, metrics."""
    if not sweeps or all(not s.rows for s in sweeps):
        raise ValueError("nothing to export")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["engine_tag", "corpus_kind", "threshold", "precision", "recall", "f_score"])
    for result in sweeps:
        for row in result.rows:
            writer.writerow(
                [
                    row.engine_tag,
                    row.corpus_kind,
                    f"{row.threshold:g}",
                    f"{row.precision:.6f}",
                    f"{row.recall:.6f}",
                    f"{row.f_score:.6f}",
                ]
            )
    from .util import atomic_write_text

    atomic_write_text(buffer.getvalue(), path)


def summary_payload(sweeps: Sequence[SweepResult]) -> dict[str, Any]:
    """Best row per engine x corpus, mirroring the usual results-table layout."""
    results = []
    for result in sweeps:
        best = result.best_row
        results.append(
            {
                "engine_tag": best.engine_tag,
                "corpus_kind": best.corpus_kind,
                "best_threshold": best.threshold,
                "f_score": best.f_score,
                "precision": best.precision,
                "recall": best.recall,
                "tp": best.tp,
                "fp": best.fp,
                "fn": best.fn,
            }
        )
    return {"results": results}
