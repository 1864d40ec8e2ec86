"""Threshold + transitive clustering of similarity scores into finding clusters.

Two findings can be related through an intermediate finding whose string sits
between them (repeated text inflates length differences), so the per-document
similar sets are closed transitively: the predicted clusters are the connected
components of the "is similar to" graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .corpus import CorpusDocument
from .errors import MalformedClusterSet
from .similarity.matrix import SimilarityMatrix


@dataclass(frozen=True)
class ClusterSet:
    """A deduplicated set of finding-ID clusters, predicted or ground truth."""

    clusters: frozenset[frozenset[int]]
    origin: str  # "predicted" or "ground_truth"
    threshold: float | None = None

    def universe(self) -> set[int]:
        return {fid for cluster in self.clusters for fid in cluster}

    def canonical(self) -> list[list[int]]:
        """Sorted ascending within clusters; clusters by (size desc, smallest ID asc)."""
        ordered = [sorted(cluster) for cluster in self.clusters]
        ordered.sort(key=lambda c: (-len(c), c[0]))
        return ordered

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"origin": self.origin, "clusters": self.canonical()}
        if self.threshold is not None:
            payload["threshold"] = self.threshold
        return payload


def similar_sets(matrix: SimilarityMatrix, threshold: float) -> dict[int, set[int]]:
    """doc j belongs to doc i's set iff score >= threshold; i is always included."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    hits = matrix.scores >= threshold
    np.fill_diagonal(hits, True)
    return {i: set(np.flatnonzero(hits[i]).tolist()) for i in range(matrix.n)}


def transitive_closure(sets: Mapping[int, set[int]]) -> set[frozenset[int]]:
    """Connected components of the undirected graph induced by set membership."""
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:  # path compression
            parent[x], x = root, parent[x]
        return root

    rank: dict[int, int] = {}

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra == rb:
            return
        if rank[ra] < rank[rb]:
            ra, rb = rb, ra
        parent[rb] = ra
        if rank[ra] == rank[rb]:
            rank[ra] += 1

    for doc_id in sets:
        parent[doc_id] = doc_id
        rank[doc_id] = 0
    for doc_id, members in sets.items():
        for member in members:
            if member not in parent:
                parent[member] = member
                rank[member] = 0

    for doc_id, members in sets.items():
        for member in members:
            union(doc_id, member)

    components: dict[int, set[int]] = {}
    for doc_id in parent:
        components.setdefault(find(doc_id), set()).add(doc_id)
    return {frozenset(component) for component in components.values()}


def to_finding_clusters(
    components: Iterable[frozenset[int]],
    corpus: list[CorpusDocument],
    threshold: float | None = None,
) -> ClusterSet:
    """Expand doc IDs to their finding IDs, union per component, dedupe."""
    finding_ids = {doc.doc_id: doc.finding_ids for doc in corpus}
    clusters: set[frozenset[int]] = set()
    for component in components:
        merged: set[int] = set()
        for doc_id in component:
            merged.update(finding_ids[doc_id])
        if merged:
            clusters.add(frozenset(merged))
    return ClusterSet(clusters=frozenset(clusters), origin="predicted", threshold=threshold)


def predict_clusters(
    matrix: SimilarityMatrix, corpus: list[CorpusDocument], threshold: float
) -> ClusterSet:
    """The full chain: threshold -> transitive closure -> finding clusters."""
    return to_finding_clusters(
        transitive_closure(similar_sets(matrix, threshold)), corpus, threshold
    )


# ---------------------------------------------------------------------------
# Interchange format
# ---------------------------------------------------------------------------

def cluster_set_from_dict(raw: dict[str, Any]) -> ClusterSet:
    if not isinstance(raw, dict) or "clusters" not in raw or "origin" not in raw:
        raise MalformedClusterSet("cluster JSON needs 'origin' and 'clusters'")
    if raw["origin"] not in ("predicted", "ground_truth"):
        raise MalformedClusterSet(f"bad origin {raw['origin']!r}")
    clusters: set[frozenset[int]] = set()
    seen: set[int] = set()
    for members in raw["clusters"]:
        if not members:
            raise MalformedClusterSet("empty cluster")
        cluster = frozenset(int(m) for m in members)
        if cluster & seen:
            raise MalformedClusterSet(f"finding ids repeated across clusters: {sorted(cluster & seen)}")
        seen.update(cluster)
        clusters.add(cluster)
    return ClusterSet(
        clusters=frozenset(clusters),
        origin=raw["origin"],
        threshold=raw.get("threshold"),
    )


def load_cluster_set(path: str | Path) -> ClusterSet:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedClusterSet(f"cannot read clusters {path}: {exc}") from exc
    return cluster_set_from_dict(raw)


def save_cluster_set(clusters: ClusterSet, path: str | Path) -> None:
    from .util import atomic_write_json

    atomic_write_json(clusters.to_dict(), path)
