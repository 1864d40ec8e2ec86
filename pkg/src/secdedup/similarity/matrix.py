"""Symmetric pairwise similarity matrix: the contract every engine satisfies."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import MalformedMatrix


@dataclass(frozen=True)
class SimilarityMatrix:
    """Dense symmetric n x n score matrix with values in [0, 1], unit diagonal."""

    n: int
    scores: np.ndarray
    engine_tag: str
    corpus_kind: str

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.shape != (self.n, self.n):
            raise MalformedMatrix(f"scores shape {scores.shape} != ({self.n}, {self.n})")
        object.__setattr__(self, "scores", scores)


def finalize_scores(scores: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1], force exact symmetry and a unit diagonal.

    Engines compute raw cosines / path aggregates; this is the single place
    where the matrix contract gets enforced, so every engine behaves alike.
    """
    scores = np.asarray(scores, dtype=np.float64)
    scores = np.clip(scores, 0.0, 1.0)
    scores = (scores + scores.T) / 2.0
    np.fill_diagonal(scores, 1.0)
    return scores


def validate_matrix(matrix: SimilarityMatrix, atol: float = 1e-9) -> None:
    """Raise MalformedMatrix unless symmetry, diagonal, and range all hold."""
    scores = matrix.scores
    if not np.array_equal(scores, scores.T):
        raise MalformedMatrix("matrix is not symmetric")
    if not np.allclose(np.diag(scores), 1.0, atol=atol, rtol=0.0):
        raise MalformedMatrix("diagonal is not 1.0")
    if scores.min() < 0.0 or scores.max() > 1.0:
        raise MalformedMatrix(f"scores outside [0, 1]: min {scores.min()}, max {scores.max()}")


def save_matrix(matrix: SimilarityMatrix, path: str | Path) -> None:
    """Write a matrix dump; .npz gets the binary form, anything else JSON."""
    target = Path(path)
    if target.suffix == ".npz":
        target.parent.mkdir(parents=True, exist_ok=True)
        np.savez_compressed(
            target,
            scores=matrix.scores,
            engine_tag=np.array(matrix.engine_tag),
            corpus_kind=np.array(matrix.corpus_kind),
        )
        return
    from ..util import atomic_write_text

    payload = {
        "engine_tag": matrix.engine_tag,
        "corpus_kind": matrix.corpus_kind,
        "n": matrix.n,
        "scores": [float(v) for v in matrix.scores.reshape(-1)],
    }
    atomic_write_text(json.dumps(payload) + "\n", target)


def load_matrix(path: str | Path) -> SimilarityMatrix:
    source = Path(path)
    if source.suffix == ".npz":
        with np.load(source) as data:
            scores = np.asarray(data["scores"], dtype=np.float64)
            return SimilarityMatrix(
                n=scores.shape[0],
                scores=scores,
                engine_tag=str(data["engine_tag"]),
                corpus_kind=str(data["corpus_kind"]),
            )
    try:
        raw = json.loads(source.read_text(encoding="utf-8"))
        n = raw["n"]
        scores = np.asarray(raw["scores"], dtype=np.float64).reshape(n, n)
        return SimilarityMatrix(
            n=n,
            scores=scores,
            engine_tag=raw["engine_tag"],
            corpus_kind=raw["corpus_kind"],
        )
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise MalformedMatrix(f"cannot read matrix {path}: {exc}") from exc
