from __future__ import annotations

import json
from pathlib import Path

import pytest

from secdedup.corpus import CorpusDocument
from secdedup.ingest import Dataset, Finding

REPO_ROOT = Path(__file__).resolve().parent.parent
BENCH_DIR = REPO_ROOT / "data" / "benchmark"


def make_finding(
    fid: int,
    tool: str = "trivy",
    testing_type: str = "SAST",
    description: str = "",
    cve_ids: tuple[str, ...] = (),
    **features: str,
) -> Finding:
    all_features = dict(features)
    if description:
        all_features["description"] = description
    return Finding(
        id=fid,
        tool=tool,
        testing_type=testing_type,
        features=all_features,
        cve_ids=cve_ids,
        source_report=f"{tool}.json",
    )


def make_dataset(findings: list[Finding], testing_type: str = "SAST") -> Dataset:
    return Dataset(findings=tuple(findings), testing_type=testing_type)


def docs_from_texts(*texts: str) -> list[CorpusDocument]:
    return [
        CorpusDocument(doc_id=i, finding_ids=frozenset({i}), text=text)
        for i, text in enumerate(texts)
    ]


@pytest.fixture(scope="session")
def bench_dir() -> Path:
    if not (BENCH_DIR / "dataset_sast.json").exists():
        pytest.fail(
            "benchmark fixture missing; run scripts/make_benchmark.py "
            "and scripts/make_dast_embeddings.py"
        )
    return BENCH_DIR


def build_sample_sast_dataset() -> Dataset:
    """Six findings, two CVE-linked groups plus two loners."""
    return make_dataset(
        [
            make_finding(1, description="Heap overflow in libfoo. Tracked as CVE-2020-1111.",
                         cve_ids=("CVE-2020-1111",)),
            make_finding(2, tool="anchore",
                         description="Heap overflow in libfoo. Tracked as CVE-2020-1111.",
                         cve_ids=("CVE-2020-1111",)),
            make_finding(3, tool="dependency-check",
                         description="Incomplete fix for CVE-2020-1111. Tracked as CVE-2020-2222.",
                         cve_ids=("CVE-2020-2222", "CVE-2020-1111")),
            make_finding(4, tool="codeql",
                         description="SQL text built from request input."),
            make_finding(5, tool="semgrep",
                         description="Query string concatenated with user data."),
            make_finding(6, tool="gitleaks",
                         description="AWS access key detected", title="aws-access-key"),
        ]
    )


def build_sample_dast_dataset() -> Dataset:
    return make_dataset(
        [
            make_finding(1, tool="zap", testing_type="DAST",
                         description="Missing content security policy header.",
                         name="CSP Header Not Set",
                         solution="Set a restrictive policy header."),
            make_finding(2, tool="arachni", testing_type="DAST",
                         description="Response carries no content security policy.",
                         name="Missing CSP",
                         solution="Supply a restrictive policy header."),
            make_finding(3, tool="zap", testing_type="DAST",
                         description="Session cookie lacks the HttpOnly flag.",
                         name="Cookie Without HttpOnly",
                         solution="Mark session cookies HttpOnly."),
        ],
        testing_type="DAST",
    )


@pytest.fixture()
def sample_sast_dataset() -> Dataset:
    return build_sample_sast_dataset()


@pytest.fixture()
def sample_dast_dataset() -> Dataset:
    return build_sample_dast_dataset()


def write_json(path: Path, payload: object) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=1), encoding="utf-8")
    return path
