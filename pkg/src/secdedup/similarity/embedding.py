"""Neural-engine provider boundary: externally computed sentence vectors.

Transformer inference stays out of process. Vectors arrive either from a
JSON Lines file (one ``{"doc_id": 0, "vector": [...]}`` record per line) or
from an embedding HTTP service (``POST {"texts": [...]} ->
{"vectors": [[...], ...]}``); similarity is cosine clamped to [0, 1].
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import requests

from ..errors import (
    DimensionMismatch,
    EmptyEmbeddingSet,
    MalformedEmbeddingFile,
    MalformedResponse,
    MissingVector,
    ServiceUnavailable,
)
from .matrix import SimilarityMatrix
from .lsi import cosine_from_vectors

DEFAULT_BATCH_SIZE = 64
DEFAULT_RETRIES = 3


@dataclass(frozen=True)
class EmbeddingSet:
    dim: int
    vectors: dict[int, tuple[float, ...]]

    def __post_init__(self) -> None:
        for doc_id, vector in self.vectors.items():
            if len(vector) != self.dim:
                raise DimensionMismatch(
                    f"doc {doc_id}: vector length {len(vector)} != dim {self.dim}"
                )


def load_embeddings(path: str | Path) -> EmbeddingSet:
    """Parse a JSON Lines embedding file and validate uniform dimension."""
    vectors: dict[int, tuple[float, ...]] = {}
    dim: int | None = None
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise MalformedEmbeddingFile(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            doc_id = record["doc_id"]
            vector = tuple(float(x) for x in record["vector"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise MalformedEmbeddingFile(f"{path}:{lineno}: {exc}") from exc
        if doc_id in vectors:
            raise MalformedEmbeddingFile(f"{path}:{lineno}: duplicate doc_id {doc_id}")
        if dim is None:
            dim = len(vector)
        elif len(vector) != dim:
            raise DimensionMismatch(
                f"{path}:{lineno}: vector length {len(vector)} != {dim}"
            )
        vectors[doc_id] = vector
    if dim is None:
        raise EmptyEmbeddingSet(f"{path}: no vectors")
    return EmbeddingSet(dim=dim, vectors=vectors)


def save_embeddings(embeddings: EmbeddingSet, path: str | Path) -> None:
    from ..util import atomic_write_text

    lines = [
        json.dumps({"doc_id": doc_id, "vector": list(vector)})
        for doc_id, vector in sorted(embeddings.vectors.items())
    ]
    atomic_write_text("\n".join(lines) + "\n", path)


def fetch_embeddings(
    endpoint: str,
    texts: Sequence[str],
    batch_size: int = DEFAULT_BATCH_SIZE,
    retries: int = DEFAULT_RETRIES,
    timeout: float = 60.0,
    backoff: float = 0.5,
    doc_ids: Sequence[int] | None = None,
) -> EmbeddingSet:
    """POST texts in batches to an embedding service, retrying transient failures."""
    if doc_ids is None:
        doc_ids = list(range(len(texts)))
    if len(doc_ids) != len(texts):
        raise MalformedResponse("doc_ids and texts length mismatch")

    session = requests.Session()
    vectors: dict[int, tuple[float, ...]] = {}
    dim: int | None = None
    for start in range(0, len(texts), batch_size):
        batch = list(texts[start : start + batch_size])
        payload = None
        last_error: Exception | None = None
        for attempt in range(retries + 1):
            try:
                response = session.post(endpoint, json={"texts": batch}, timeout=timeout)
                if response.status_code >= 500:
                    last_error = ServiceUnavailable(f"HTTP {response.status_code}")
                elif response.status_code != 200:
                    raise MalformedResponse(f"HTTP {response.status_code}: {response.text[:200]}")
                else:
                    payload = response.json()
                    break
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_error = exc
            except json.JSONDecodeError as exc:
                raise MalformedResponse(f"non-JSON response: {exc}") from exc
            if attempt < retries:
                time.sleep(backoff * (2**attempt))
        if payload is None:
            raise ServiceUnavailable(f"{endpoint}: {last_error}")

        batch_vectors = payload.get("vectors") if isinstance(payload, dict) else None
        if not isinstance(batch_vectors, list) or len(batch_vectors) != len(batch):
            raise MalformedResponse(
                f"expected {len(batch)} vectors, got "
                f"{len(batch_vectors) if isinstance(batch_vectors, list) else type(batch_vectors)}"
            )
        for offset, vector in enumerate(batch_vectors):
            try:
                values = tuple(float(x) for x in vector)
            except (TypeError, ValueError) as exc:
                raise MalformedResponse(f"bad vector at {start + offset}: {exc}") from exc
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise DimensionMismatch(f"vector {start + offset}: {len(values)} != {dim}")
            vectors[doc_ids[start + offset]] = values
    if dim is None:
        raise EmptyEmbeddingSet("service returned no vectors")
    return EmbeddingSet(dim=dim, vectors=vectors)


def embedding_similarity(
    doc_ids: Iterable[int], embeddings: EmbeddingSet, corpus_kind: str = ""
) -> SimilarityMatrix:
    """Cosine similarity of the documents' vectors, clamped to [0, 1]."""
    ids = list(doc_ids)
    rows = []
    for doc_id in ids:
        vector = embeddings.vectors.get(doc_id)
        if vector is None:
            raise MissingVector(str(doc_id))
        rows.append(vector)
    matrix = np.asarray(rows, dtype=np.float64).reshape(len(ids), embeddings.dim)
    return SimilarityMatrix(
        n=len(ids),
        scores=cosine_from_vectors(matrix),
        engine_tag="embedding",
        corpus_kind=corpus_kind,
    )
