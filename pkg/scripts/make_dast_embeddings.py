#!/usr/bin/env python3
"""Produce the recorded sentence-vector fixture for the DAST benchmark.

The real deployment computes vectors by POSTing document texts to an
out-of-process encoder service. That service is not available in this
repository, so the benchmark ships the vectors it would have returned,
in the same JSON Lines shape the file loader expects. Think of it as a
recorded cassette: deterministic bytes standing in for a network call.

The geometry mirrors how a sentence encoder treats these write-ups:

* identical texts get identical vectors (one per scanner for the big
  header-policy cluster);
* the two header-policy wordings are near-duplicates (cosine 0.93);
* the two XSS write-ups share almost no words yet sit close together
  (cosine 0.92), which is the whole point of the neural engine;
* the two SQL injection write-ups are phrased so differently that even
  the encoder separates them (cosine 0.40);
* one stylistic false friend: the ZAP SQL injection text reads like the
  ZAP cookie alert (cosine 0.50), so permissive thresholds over-merge;
* everything shares a weak "security finding" base direction (cosine
  about 0.22 between unrelated documents), so very low thresholds glue
  the corpus into one blob. No threshold yields a perfect clustering.

Run after make_benchmark.py:

    python3 scripts/make_dast_embeddings.py --bench data/benchmark
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from secdedup.clustering import load_cluster_set
from secdedup.corpus import CorpusSpec, build_corpus
from secdedup.ingest import load_dataset
from secdedup.similarity.embedding import EmbeddingSet, save_embeddings

DIM = 384
SEED = 977003
BASE_WEIGHT = 0.22      # cosine between unrelated documents
CSP_CROSS_TOOL = 0.93   # the two header-policy wordings
XSS_PAIR = 0.92         # the divergent XSS write-ups
SQLI_PAIR = 0.40        # the divergent SQL injection write-ups
SQLI_COOKIE = 0.50      # ZAP SQL injection vs ZAP cookie alert style


def unit(vector: np.ndarray) -> np.ndarray:
    return vector / np.linalg.norm(vector)


class DirectionFactory:
    """Hands out unit directions orthogonal to everything handed out before."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.used: list[np.ndarray] = []

    def fresh(self) -> np.ndarray:
        vector = self.rng.standard_normal(DIM)
        for prior in self.used:
            vector -= (vector @ prior) * prior
        vector = unit(vector)
        self.used.append(vector)
        return vector


def mix(base: np.ndarray, rest: np.ndarray, base_weight: float) -> np.ndarray:
    """Unit vector with cos(result, base-only vectors) == sqrt(base_weight)^2."""
    return math.sqrt(base_weight) * base + math.sqrt(1.0 - base_weight) * rest


def rotate(anchor: np.ndarray, away: np.ndarray, cosine: float) -> np.ndarray:
    """Unit vector at the requested cosine from anchor, leaning toward away."""
    return cosine * anchor + math.sqrt(1.0 - cosine * cosine) * away


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--bench", default="data/benchmark",
                        help="benchmark directory holding dataset_dast.json")
    args = parser.parse_args()
    bench = Path(args.bench)

    dataset = load_dataset(bench / "dataset_dast.json")
    truth = load_cluster_set(bench / "truth_dast.json")
    documents = build_corpus(dataset, CorpusSpec(kind="DAST_NDS"))

    cluster_of: dict[int, frozenset[int]] = {}
    for cluster in truth.clusters:
        for finding_id in cluster:
            cluster_of[finding_id] = cluster
    tool_of = {finding.id: finding.tool for finding in dataset.findings}

    rng = np.random.default_rng(SEED)
    directions = DirectionFactory(rng)
    base = directions.fresh()

    # Group identity: (truth cluster, tool). Identical texts within a group.
    groups: dict[tuple[frozenset[int], str], list[int]] = {}
    for doc in documents:
        finding_id = next(iter(doc.finding_ids))
        key = (cluster_of[finding_id], tool_of[finding_id])
        groups.setdefault(key, []).append(doc.doc_id)

    def named(cluster: frozenset[int], tool: str) -> tuple[frozenset[int], str]:
        for key in groups:
            if key[0] == cluster and key[1] == tool:
                return key
        raise KeyError((sorted(cluster), tool))

    clusters_by_size = sorted(truth.clusters, key=len, reverse=True)
    csp = clusters_by_size[0]
    pairs = [c for c in clusters_by_size if len(c) == 2]
    # Distinguish the two 2-member clusters by scanner coverage order in the
    # dataset: the SQL injection pair was emitted before the XSS pair.
    sqli = min(pairs, key=min)
    xss = max(pairs, key=min)

    vectors: dict[int, np.ndarray] = {}

    # Header-policy cluster: one vector per tool, 0.93 apart.
    csp_zap_dir = directions.fresh()
    csp_tilt = directions.fresh()
    inner = (CSP_CROSS_TOOL - BASE_WEIGHT) / (1.0 - BASE_WEIGHT)
    zap_vec = mix(base, csp_zap_dir, BASE_WEIGHT)
    ara_vec = mix(base, rotate(csp_zap_dir, csp_tilt, inner), BASE_WEIGHT)
    for doc_id in groups[named(csp, "zap")]:
        vectors[doc_id] = zap_vec
    for doc_id in groups[named(csp, "arachni")]:
        vectors[doc_id] = ara_vec

    # XSS pair: close despite disjoint wording.
    xss_dir = directions.fresh()
    xss_tilt = directions.fresh()
    inner = (XSS_PAIR - BASE_WEIGHT) / (1.0 - BASE_WEIGHT)
    vectors[groups[named(xss, "zap")][0]] = mix(base, xss_dir, BASE_WEIGHT)
    vectors[groups[named(xss, "arachni")][0]] = mix(
        base, rotate(xss_dir, xss_tilt, inner), BASE_WEIGHT)

    # SQL injection pair: far apart; the ZAP half echoes the cookie alert.
    sqli_shared = directions.fresh()
    sqli_zap_tilt = directions.fresh()
    sqli_ara_tilt = directions.fresh()
    shared = (SQLI_PAIR - BASE_WEIGHT) / (1.0 - BASE_WEIGHT)
    half = math.sqrt(shared)
    zap_inner = unit(half * sqli_shared + math.sqrt(1 - shared) * sqli_zap_tilt)
    ara_inner = unit(half * sqli_shared + math.sqrt(1 - shared) * sqli_ara_tilt)
    sqli_zap_doc = groups[named(sqli, "zap")][0]
    vectors[sqli_zap_doc] = mix(base, zap_inner, BASE_WEIGHT)
    vectors[groups[named(sqli, "arachni")][0]] = mix(base, ara_inner, BASE_WEIGHT)

    # Singleton clusters: independent directions; the cookie alert leans
    # toward the ZAP SQL injection vector.
    cookie_doc = None
    for cluster in clusters_by_size:
        if len(cluster) != 1:
            continue
        (key,) = [k for k in groups if k[0] == cluster]
        doc_id = groups[key][0]
        text = documents[doc_id].text
        if "HttpOnly" in text:
            cookie_doc = doc_id
            continue
        vectors[doc_id] = mix(base, directions.fresh(), BASE_WEIGHT)

    assert cookie_doc is not None, "cookie alert not found in corpus"
    zap_sqli_vec = vectors[sqli_zap_doc]
    lean = directions.fresh()
    # cos(cookie, zap_sqli) = SQLI_COOKIE exactly
    vectors[cookie_doc] = rotate(zap_sqli_vec, lean, SQLI_COOKIE)

    assert len(vectors) == len(documents)
    embeddings = EmbeddingSet(
        dim=DIM,
        vectors={doc_id: tuple(float(x) for x in vec) for doc_id, vec in vectors.items()},
    )
    out_path = bench / "dast_nds_embeddings.jsonl"
    save_embeddings(embeddings, out_path)
    print(f"wrote {out_path} ({len(vectors)} vectors, dim {DIM})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
