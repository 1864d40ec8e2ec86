"""Parse heterogeneous JSON security-tool reports into normalized findings.

Every scanner exports its own JSON schema; the same conceptual feature hides
behind different property names (description vs. FullDescription vs. text vs.
Message ...). A SchemaMapping externalizes that knowledge per tool as dot-path
selectors, so adding a tool is configuration, not code.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import (
    DuplicateFindingId,
    DuplicateTool,
    MalformedCatalog,
    MalformedReport,
    MixedTestingType,
    PathNotFound,
)

CANONICAL_FEATURES = ("description", "name", "solution", "cve_ids", "location", "title")
TESTING_TYPES = ("SAST", "DAST")

CVE_PATTERN = re.compile(r"CVE-\d{4}-\d{4,}")

_WHITESPACE_RUN = re.compile(r"\s+")


def normalize_text(value: Any) -> str:
    """Unicode NFC, line breaks and whitespace runs collapsed to single spaces."""
    if value is None:
        return ""
    text = value if isinstance(value, str) else json.dumps(value, ensure_ascii=False)
    text = unicodedata.normalize("NFC", text)
    return _WHITESPACE_RUN.sub(" ", text).strip()


# ---------------------------------------------------------------------------
# Dot-path selectors
# ---------------------------------------------------------------------------

def resolve_path(document: Any, path: str) -> list[Any]:
    """Resolve a dot-path selector against a parsed JSON document.

    Path language: keys separated by ".", with "[*]" suffixes flattening
    arrays. The empty path selects the document root. Returns the list of
    matched values (missing keys match nothing).
    """
    current = [document]
    if path == "":
        return current
    for segment in path.split("."):
        stars = 0
        while segment.endswith("[*]"):
            segment = segment[:-3]
            stars += 1
        next_values: list[Any] = []
        for value in current:
            if segment:
                if not isinstance(value, dict) or segment not in value:
                    continue
                value = value[segment]
            matched = [value]
            for _ in range(stars):
                flattened: list[Any] = []
                for item in matched:
                    if isinstance(item, list):
                        flattened.extend(item)
                matched = flattened
            next_values.extend(matched)
        current = next_values
    return current


def select_text(obj: Any, selector: str) -> str:
    """Extract one feature string from a finding object via a dot-path."""
    values = resolve_path(obj, selector)
    parts = [normalize_text(v) for v in values]
    return " ".join(p for p in parts if p)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchemaMapping:
    """Per-tool recipe for locating findings and their features in a report."""

    tool_name: str
    testing_type: str
    findings_path: str
    feature_selectors: dict[str, str]
    id_strategy: str = "sequential"  # "sequential" or "from_field:<selector>"

    def __post_init__(self) -> None:
        if self.testing_type not in TESTING_TYPES:
            raise MalformedCatalog(
                f"{self.tool_name}: testing_type must be SAST or DAST, got {self.testing_type!r}"
            )
        if not ("description" in self.feature_selectors or "title" in self.feature_selectors):
            raise MalformedCatalog(
                f"{self.tool_name}: feature_selectors needs at least 'description' or 'title'"
            )
        unknown = set(self.feature_selectors) - set(CANONICAL_FEATURES)
        if unknown:
            raise MalformedCatalog(f"{self.tool_name}: unknown feature names {sorted(unknown)}")
        if self.id_strategy != "sequential" and not self.id_strategy.startswith("from_field:"):
            raise MalformedCatalog(f"{self.tool_name}: bad id_strategy {self.id_strategy!r}")


@dataclass(frozen=True)
class Finding:
    """One normalized scanner result."""

    id: int
    tool: str
    testing_type: str
    features: dict[str, str]
    cve_ids: tuple[str, ...]
    source_report: str

    def feature(self, name: str) -> str:
        return self.features.get(name, "")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "tool": self.tool,
            "features": dict(self.features),
            "cve_ids": list(self.cve_ids),
            "source_report": self.source_report,
        }


@dataclass(frozen=True)
class Dataset:
    """All findings of one testing iteration, single testing type."""

    findings: tuple[Finding, ...]
    testing_type: str

    def ids(self) -> set[int]:
        return {f.id for f in self.findings}

    def by_id(self) -> dict[int, Finding]:
        return {f.id: f for f in self.findings}

    def to_dict(self) -> dict[str, Any]:
        return {
            "testing_type": self.testing_type,
            "findings": [f.to_dict() for f in self.findings],
        }


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def load_schema_catalog(path: str | Path) -> list[SchemaMapping]:
    """Load a catalog JSON file: a list of per-tool schema mappings."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedCatalog(f"cannot read catalog {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise MalformedCatalog("catalog root must be a JSON array")
    mappings: list[SchemaMapping] = []
    seen: set[str] = set()
    for entry in raw:
        if not isinstance(entry, dict):
            raise MalformedCatalog("catalog entries must be objects")
        try:
            mapping = SchemaMapping(
                tool_name=entry["tool_name"],
                testing_type=entry["testing_type"],
                findings_path=entry["findings_path"],
                feature_selectors=dict(entry["feature_selectors"]),
                id_strategy=entry.get("id_strategy", "sequential"),
            )
        except KeyError as exc:
            raise MalformedCatalog(f"catalog entry missing key {exc}") from exc
        if mapping.tool_name in seen:
            raise DuplicateTool(mapping.tool_name)
        seen.add(mapping.tool_name)
        mappings.append(mapping)
    return mappings


def load_default_catalog() -> list[SchemaMapping]:
    """Load the schema mappings packaged for the supported scanners."""
    from importlib import resources

    ref = resources.files("secdedup.presets").joinpath("catalog.json")
    with resources.as_file(ref) as path:
        return load_schema_catalog(path)


def harvest_cve_ids(texts: list[str]) -> tuple[str, ...]:
    """Regex-scan feature texts for CVE identifiers, first-seen order, deduplicated."""
    seen: dict[str, None] = {}
    for text in texts:
        for match in CVE_PATTERN.findall(text):
            seen.setdefault(match, None)
    return tuple(seen)


def parse_report(
    report: str | Path, mapping: SchemaMapping, next_id: int
) -> list[Finding]:
    """Parse one report file into normalized findings.

    Features are extracted via the mapping's selectors; a missing selector
    target yields the empty string. CVE-IDs are harvested by regex over all
    extracted feature text, so they are always backed by visible text.
    """
    report_path = Path(report)
    try:
        document = json.loads(report_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedReport(f"cannot read report {report}: {exc}") from exc

    matches = resolve_path(document, mapping.findings_path)
    if mapping.findings_path.endswith("[*]"):
        # the path flattens down to the finding objects themselves
        items = matches
    else:
        if not matches or not all(isinstance(m, list) for m in matches):
            raise PathNotFound(
                f"{mapping.tool_name}: findings_path {mapping.findings_path!r} "
                "did not resolve to an array"
            )
        items = [item for m in matches for item in m]

    findings: list[Finding] = []
    for offset, obj in enumerate(items):
        features = {
            name: select_text(obj, selector)
            for name, selector in mapping.feature_selectors.items()
        }
        if mapping.id_strategy == "sequential":
            fid = next_id + offset
        else:
            selector = mapping.id_strategy.split(":", 1)[1]
            raw = select_text(obj, selector)
            if not raw:
                raise MalformedReport(f"{mapping.tool_name}: id field {selector!r} empty")
            try:
                fid = int(raw)
            except ValueError as exc:
                raise MalformedReport(f"{mapping.tool_name}: non-integer id {raw!r}") from exc
        findings.append(
            Finding(
                id=fid,
                tool=mapping.tool_name,
                testing_type=mapping.testing_type,
                features=features,
                cve_ids=harvest_cve_ids(list(features.values())),
                source_report=report_path.name,
            )
        )
    return findings


def assemble_dataset(
    parsed: list[tuple[str, list[Finding]]], testing_type: str
) -> Dataset:
    """Concatenate per-tool finding lists into one dataset, enforcing invariants."""
    all_findings: list[Finding] = []
    seen_ids: set[int] = set()
    for _tool, findings in parsed:
        for finding in findings:
            if finding.testing_type != testing_type:
                raise MixedTestingType(
                    f"finding {finding.id} is {finding.testing_type}, dataset is {testing_type}"
                )
            if finding.id in seen_ids:
                raise DuplicateFindingId(str(finding.id))
            seen_ids.add(finding.id)
            all_findings.append(finding)
    return Dataset(findings=tuple(all_findings), testing_type=testing_type)


# ---------------------------------------------------------------------------
# Interchange format
# ---------------------------------------------------------------------------

def dataset_from_dict(raw: dict[str, Any]) -> Dataset:
    if not isinstance(raw, dict) or "findings" not in raw or "testing_type" not in raw:
        raise MalformedReport("dataset JSON needs 'testing_type' and 'findings'")
    testing_type = raw["testing_type"]
    if testing_type not in TESTING_TYPES:
        raise MalformedReport(f"bad testing_type {testing_type!r}")
    findings = []
    seen: set[int] = set()
    for obj in raw["findings"]:
        fid = obj["id"]
        if not isinstance(fid, int) or fid < 0:
            raise MalformedReport(f"finding id must be a non-negative integer, got {fid!r}")
        if fid in seen:
            raise DuplicateFindingId(str(fid))
        seen.add(fid)
        cve_ids = tuple(obj.get("cve_ids", ()))
        for cve in cve_ids:
            if not CVE_PATTERN.fullmatch(cve):
                raise MalformedReport(f"finding {fid}: bad CVE id {cve!r}")
        findings.append(
            Finding(
                id=fid,
                tool=obj.get("tool", ""),
                testing_type=testing_type,
                features={k: "" if v is None else str(v) for k, v in obj.get("features", {}).items()},
                cve_ids=cve_ids,
                source_report=obj.get("source_report", ""),
            )
        )
    return Dataset(findings=tuple(findings), testing_type=testing_type)


def load_dataset(path: str | Path) -> Dataset:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedReport(f"cannot read dataset {path}: {exc}") from exc
    return dataset_from_dict(raw)


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    from .util import atomic_write_json

    atomic_write_json(dataset.to_dict(), path)
