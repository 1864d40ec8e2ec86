"""Build finding-string corpora from a normalized dataset.

Four corpus kinds:

* SAST_D    - one document per SAST finding, description only
* SAST_ConcD - SAST findings sharing a CVE-ID merged into one concatenated
               description document (transitively, via shared identifiers)
* DAST_NDS  - one document per DAST finding: name + description + solution
* DAST_D    - one document per DAST finding, description only

CVE concatenation exists because SAST descriptions are too brief on their
own; merging every description written for the same CVE yields enough text
for the similarity engines to work with.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

from .errors import MalformedReport, SpecMismatch
from .ingest import Dataset, Finding

CORPUS_KINDS = ("SAST_D", "SAST_ConcD", "DAST_NDS", "DAST_D")

_KIND_FEATURES = {
    "SAST_D": ("description",),
    "SAST_ConcD": ("description",),
    "DAST_NDS": ("name", "description", "solution"),
    "DAST_D": ("description",),
}

DEFAULT_SEPARATOR = ". "


@dataclass(frozen=True)
class CorpusDocument:
    """One finding string, keyed to the finding IDs it represents."""

    doc_id: int
    finding_ids: frozenset[int]
    text: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "doc_id": self.doc_id,
            "finding_ids": sorted(self.finding_ids),
            "text": self.text,
        }


@dataclass(frozen=True)
class CorpusSpec:
    """Which corpus to build and how features are concatenated."""

    kind: str
    feature_order: tuple[str, ...] = ()
    separator: str = DEFAULT_SEPARATOR

    def __post_init__(self) -> None:
        if self.kind not in CORPUS_KINDS:
            raise SpecMismatch(f"unknown corpus kind {self.kind!r}")
        if not self.feature_order:
            object.__setattr__(self, "feature_order", _KIND_FEATURES[self.kind])

    @property
    def testing_type(self) -> str:
        return "SAST" if self.kind.startswith("SAST") else "DAST"


def cve_grouping(findings: Iterable[Finding]) -> list[set[int]]:
    """Connected components of findings joined by shared CVE-IDs.

    Findings without any CVE-ID stay singletons. Groups come back ordered by
    their smallest finding ID.
    """
    findings = list(findings)
    parent: dict[int, int] = {f.id: f.id for f in findings}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    first_with_cve: dict[str, int] = {}
    for finding in findings:
        for cve in finding.cve_ids:
            if cve in first_with_cve:
                union(first_with_cve[cve], finding.id)
            else:
                first_with_cve[cve] = finding.id

    groups: dict[int, set[int]] = {}
    for finding in findings:
        groups.setdefault(find(finding.id), set()).add(finding.id)
    return [groups[root] for root in sorted(groups)]


def _finding_text(finding: Finding, spec: CorpusSpec) -> str:
    parts = [finding.feature(name) for name in spec.feature_order]
    return spec.separator.join(p for p in parts if p)


def build_corpus(dataset: Dataset, spec: CorpusSpec) -> list[CorpusDocument]:
    """Build the corpus documents for one dataset.

    The documents partition the dataset: every finding ID appears in exactly
    one document's finding_ids set.
    """
    if spec.testing_type != dataset.testing_type:
        raise SpecMismatch(
            f"corpus kind {spec.kind} needs a {spec.testing_type} dataset, "
            f"got {dataset.testing_type}"
        )

    documents: list[CorpusDocument] = []
    if spec.kind == "SAST_ConcD":
        by_id = dataset.by_id()
        for doc_id, group in enumerate(cve_grouping(dataset.findings)):
            texts: list[str] = []
            seen: set[str] = set()
            for fid in sorted(group):
                text = _finding_text(by_id[fid], spec)
                # repeated descriptions within one CVE group distort length,
                # not meaning; keep the first occurrence only
                if text and text not in seen:
                    seen.add(text)
                    texts.append(text)
            documents.append(
                CorpusDocument(
                    doc_id=doc_id,
                    finding_ids=frozenset(group),
                    text=spec.separator.join(texts),
                )
            )
    else:
        for doc_id, finding in enumerate(dataset.findings):
            documents.append(
                CorpusDocument(
                    doc_id=doc_id,
                    finding_ids=frozenset({finding.id}),
                    text=_finding_text(finding, spec),
                )
            )
    return documents


# ---------------------------------------------------------------------------
# Interchange format
# ---------------------------------------------------------------------------

def corpus_to_dict(kind: str, documents: list[CorpusDocument]) -> dict[str, Any]:
    return {"kind": kind, "documents": [d.to_dict() for d in documents]}


def corpus_from_dict(raw: dict[str, Any]) -> tuple[str, list[CorpusDocument]]:
    if not isinstance(raw, dict) or "kind" not in raw or "documents" not in raw:
        raise MalformedReport("corpus JSON needs 'kind' and 'documents'")
    documents = [
        CorpusDocument(
            doc_id=obj["doc_id"],
            finding_ids=frozenset(obj["finding_ids"]),
            text=obj["text"],
        )
        for obj in raw["documents"]
    ]
    return raw["kind"], documents


def load_corpus(path: str | Path) -> tuple[str, list[CorpusDocument]]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedReport(f"cannot read corpus {path}: {exc}") from exc
    return corpus_from_dict(raw)


def save_corpus(kind: str, documents: list[CorpusDocument], path: str | Path) -> None:
    from .util import atomic_write_json

    atomic_write_json(corpus_to_dict(kind, documents), path)
