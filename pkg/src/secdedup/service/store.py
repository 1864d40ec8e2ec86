"""Durable session state behind the annotation service.

Each session persists as an append-only JSONL event log plus a periodic
snapshot. Every mutation is fsynced to the log before the caller sees a
response, so a killed process recovers to the last committed operation by
loading the snapshot and replaying the log tail (events carry sequence
numbers; replay skips anything the snapshot already folded in).
"""

from __future__ import annotations

import datetime as _dt
import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..clustering import ClusterSet, cluster_set_from_dict
from ..corpus import CorpusSpec
from ..errors import MalformedClusterSet, MalformedReport, SecdedupError
from ..evaluation import evaluate
from ..ingest import (
    Dataset,
    Finding,
    SchemaMapping,
    dataset_from_dict,
    harvest_cve_ids,
    resolve_path,
    select_text,
)
from ..util import atomic_write_json
from .reasons import BUILTIN_REASONS, CUSTOM_REASON_BASE

SNAPSHOT_EVERY = 100

VERDICTS = ("pending", "incorrect", "correct_annotation_error")


class ServiceError(SecdedupError):
    """Error with a wire code and HTTP status for the REST layer."""

    def __init__(self, code: str, status: int, detail: Any = None):
        super().__init__(code if detail is None else f"{code}: {detail}")
        self.code = code
        self.status = status
        self.detail = detail


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="milliseconds")


@dataclass
class ReviewItem:
    predicted_cluster: list[int]
    matched_truth: list[int] | None
    verdict: str = "pending"
    reasons: list[int] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "predicted_cluster": self.predicted_cluster,
            "matched_truth": self.matched_truth,
            "verdict": self.verdict,
            "reasons": self.reasons,
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "ReviewItem":
        return cls(
            predicted_cluster=list(raw["predicted_cluster"]),
            matched_truth=list(raw["matched_truth"]) if raw.get("matched_truth") else None,
            verdict=raw.get("verdict", "pending"),
            reasons=list(raw.get("reasons", [])),
        )


@dataclass
class SessionState:
    session_id: str
    dataset: Dataset
    named_clusters: dict[str, set[int]] = field(default_factory=dict)
    review_predicted: list[list[int]] | None = None
    review_items: list[ReviewItem] = field(default_factory=list)
    created_at: str = ""
    updated_at: str = ""
    seq: int = 0

    def assigned_ids(self) -> set[int]:
        return {fid for members in self.named_clusters.values() for fid in members}

    def unassigned_ids(self) -> list[int]:
        return sorted(self.dataset.ids() - self.assigned_ids())

    def display_text(self, finding: Finding) -> str:
        kind = "DAST_NDS" if self.dataset.testing_type == "DAST" else "SAST_D"
        spec = CorpusSpec(kind=kind)
        parts = [finding.feature(name) for name in spec.feature_order]
        return spec.separator.join(p for p in parts if p)

    def cluster_of(self, finding_id: int) -> str | None:
        for name, members in self.named_clusters.items():
            if finding_id in members:
                return name
        return None

    # --- snapshot form ---

    def to_snapshot(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "dataset": self.dataset.to_dict(),
            "named_clusters": {name: sorted(ids) for name, ids in self.named_clusters.items()},
            "review_predicted": self.review_predicted,
            "review_items": [item.to_dict() for item in self.review_items],
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "seq": self.seq,
        }

    @classmethod
    def from_snapshot(cls, raw: dict[str, Any]) -> "SessionState":
        return cls(
            session_id=raw["session_id"],
            dataset=dataset_from_dict(raw["dataset"]),
            named_clusters={name: set(ids) for name, ids in raw["named_clusters"].items()},
            review_predicted=raw.get("review_predicted"),
            review_items=[ReviewItem.from_dict(i) for i in raw.get("review_items", [])],
            created_at=raw["created_at"],
            updated_at=raw["updated_at"],
            seq=raw["seq"],
        )


def _apply_event(state: SessionState, event: dict[str, Any]) -> None:
    """Fold one committed event into session state. Must stay deterministic."""
    op = event["op"]
    if op == "create":
        state.created_at = event["ts"]
    elif op == "add_findings":
        extra = dataset_from_dict(
            {"testing_type": state.dataset.testing_type, "findings": event["findings"]}
        )
        state.dataset = Dataset(
            findings=state.dataset.findings + extra.findings,
            testing_type=state.dataset.testing_type,
        )
    elif op == "assign":
        ids = set(event["ids"])
        for name in list(state.named_clusters):
            state.named_clusters[name] -= ids
            if not state.named_clusters[name]:
                del state.named_clusters[name]
        state.named_clusters.setdefault(event["cluster"], set()).update(ids)
    elif op == "open_review":
        state.review_predicted = event["predicted"]
        state.review_items = [ReviewItem.from_dict(i) for i in event["items"]]
    elif op == "tag":
        item = state.review_items[event["index"]]
        item.verdict = event["verdict"]
        item.reasons = sorted(event["reasons"])
    else:
        raise MalformedReport(f"unknown event op {op!r}")
    state.updated_at = event["ts"]
    state.seq = event["seq"]


class SessionStore:
    """All sessions plus the custom-reason registry, persisted under one directory."""

    def __init__(
        self,
        data_dir: str | Path,
        snapshot_every: int = SNAPSHOT_EVERY,
        catalog: dict[str, SchemaMapping] | None = None,
    ):
        self.data_dir = Path(data_dir)
        self.sessions_dir = self.data_dir / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.snapshot_every = snapshot_every
        self.catalog = catalog or {}
        self._store_lock = threading.Lock()
        self._locks: dict[str, threading.RLock] = {}
        self._states: dict[str, SessionState] = {}
        self._custom_reasons: dict[int, str] = {}
        self._load_reasons()
        self._load_sessions()

    # ------------------------------------------------------------------
    # loading
    # ------------------------------------------------------------------

    def _load_reasons(self) -> None:
        path = self.data_dir / "reasons.json"
        if path.exists():
            raw = json.loads(path.read_text(encoding="utf-8"))
            self._custom_reasons = {int(k): v for k, v in raw.items()}

    def _save_reasons(self) -> None:
        atomic_write_json(
            {str(k): v for k, v in sorted(self._custom_reasons.items())},
            self.data_dir / "reasons.json",
        )

    def _session_dir(self, session_id: str) -> Path:
        return self.sessions_dir / session_id

    def _load_sessions(self) -> None:
        for session_dir in sorted(self.sessions_dir.iterdir()):
            if not session_dir.is_dir():
                continue
            state = self._load_one(session_dir)
            if state is not None:
                self._states[state.session_id] = state
                self._locks[state.session_id] = threading.RLock()

    def _load_one(self, session_dir: Path) -> SessionState | None:
        snapshot_path = session_dir / "snapshot.json"
        log_path = session_dir / "log.jsonl"
        state: SessionState | None = None
        if snapshot_path.exists():
            state = SessionState.from_snapshot(
                json.loads(snapshot_path.read_text(encoding="utf-8"))
            )
        if log_path.exists():
            for line in log_path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError:
                    break  # torn tail write: everything before it is committed
                if state is None:
                    if event["op"] != "create":
                        raise MalformedReport(f"{log_path}: first event is not create")
                    state = SessionState(
                        session_id=session_dir.name,
                        dataset=dataset_from_dict(event["dataset"]),
                    )
                    _apply_event(state, event)
                    continue
                if event["seq"] <= state.seq:
                    continue  # already folded into the snapshot
                _apply_event(state, event)
        return state

    # ------------------------------------------------------------------
    # event plumbing
    # ------------------------------------------------------------------

    def _append(self, state: SessionState, event: dict[str, Any]) -> None:
        event = {"seq": state.seq + 1, "ts": _now(), **event}
        log_path = self._session_dir(state.session_id) / "log.jsonl"
        with open(log_path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(event, ensure_ascii=False) + "\n")
            handle.flush()
            os.fsync(handle.fileno())
        _apply_event(state, event)
        self._maybe_compact(state, log_path)

    def _maybe_compact(self, state: SessionState, log_path: Path) -> None:
        with open(log_path, "rb") as handle:
            lines = sum(1 for _ in handle)
        if lines < self.snapshot_every:
            return
        atomic_write_json(
            state.to_snapshot(), self._session_dir(state.session_id) / "snapshot.json"
        )
        with open(log_path, "w", encoding="utf-8"):
            pass  # events up to snapshot.seq are now folded in

    def _state(self, session_id: str) -> SessionState:
        state = self._states.get(session_id)
        if state is None:
            raise ServiceError("UnknownSession", 404, session_id)
        return state

    def lock(self, session_id: str) -> threading.RLock:
        lock = self._locks.get(session_id)
        if lock is None:
            raise ServiceError("UnknownSession", 404, session_id)
        return lock

    def session_ids(self) -> list[str]:
        return sorted(self._states)

    # ------------------------------------------------------------------
    # operations
    # ------------------------------------------------------------------

    def create_session(self, dataset_raw: dict[str, Any]) -> SessionState:
        try:
            dataset = dataset_from_dict(dataset_raw)
        except SecdedupError as exc:
            raise ServiceError("InvalidDataset", 400, str(exc)) from exc
        if not dataset.findings:
            raise ServiceError("InvalidDataset", 400, "dataset has no findings")
        session_id = uuid.uuid4().hex[:12]
        with self._store_lock:
            session_dir = self._session_dir(session_id)
            session_dir.mkdir(parents=True)
            state = SessionState(session_id=session_id, dataset=dataset)
            self._states[session_id] = state
            self._locks[session_id] = threading.RLock()
        with self._locks[session_id]:
            self._append(state, {"op": "create", "dataset": dataset.to_dict()})
        return state

    def create_session_from_reports(
        self, reports: list[dict[str, Any]], testing_type: str
    ) -> SessionState:
        findings = self._parse_report_payloads(reports, testing_type, next_id=1)
        if not findings:
            raise ServiceError("InvalidDataset", 400, "reports contained no findings")
        dataset = {
            "testing_type": testing_type,
            "findings": [f.to_dict() for f in findings],
        }
        return self.create_session(dataset)

    def _payload_mapping(self, payload: dict[str, Any]) -> SchemaMapping:
        if "mapping" in payload:
            raw = payload["mapping"]
            try:
                return SchemaMapping(
                    tool_name=raw["tool_name"],
                    testing_type=raw["testing_type"],
                    findings_path=raw["findings_path"],
                    feature_selectors=dict(raw["feature_selectors"]),
                    id_strategy=raw.get("id_strategy", "sequential"),
                )
            except (KeyError, TypeError, SecdedupError) as exc:
                raise ServiceError("InvalidRequest", 400, f"bad mapping: {exc}") from exc
        tool = payload.get("tool")
        if tool in self.catalog:
            return self.catalog[tool]
        raise ServiceError(
            "InvalidRequest", 400, f"payload needs 'mapping' or a cataloged 'tool', got {tool!r}"
        )

    def _parse_report_payloads(
        self, reports: list[dict[str, Any]], testing_type: str, next_id: int
    ) -> list[Finding]:
        findings: list[Finding] = []
        for payload in reports:
            if not isinstance(payload, dict):
                raise ServiceError("InvalidRequest", 400, "report payload must be an object")
            mapping = self._payload_mapping(payload)
            if mapping.testing_type != testing_type:
                raise ServiceError(
                    "InvalidRequest",
                    400,
                    f"{mapping.tool_name} is {mapping.testing_type}, session is {testing_type}",
                )
            document = payload.get("report")
            source = payload.get("source", mapping.tool_name)
            matches = resolve_path(document, mapping.findings_path)
            if mapping.findings_path.endswith("[*]"):
                items = matches
            elif matches and all(isinstance(m, list) for m in matches):
                items = [item for m in matches for item in m]
            else:
                raise ServiceError(
                    "InvalidRequest",
                    400,
                    f"{mapping.tool_name}: findings_path did not resolve to an array",
                )
            for obj in items:
                features = {
                    name: select_text(obj, selector)
                    for name, selector in mapping.feature_selectors.items()
                }
                findings.append(
                    Finding(
                        id=next_id,
                        tool=mapping.tool_name,
                        testing_type=testing_type,
                        features=features,
                        cve_ids=harvest_cve_ids(list(features.values())),
                        source_report=source,
                    )
                )
                next_id += 1
        return findings

    def add_report(self, session_id: str, payload: dict[str, Any]) -> SessionState:
        state = self._state(session_id)
        with self.lock(session_id):
            next_id = max(state.dataset.ids(), default=0) + 1
            findings = self._parse_report_payloads(
                [payload], state.dataset.testing_type, next_id
            )
            if not findings:
                raise ServiceError("InvalidRequest", 400, "report contained no findings")
            self._append(
                state,
                {"op": "add_findings", "findings": [f.to_dict() for f in findings]},
            )
        return state

    def assign(self, session_id: str, cluster_name: str, finding_ids: list[int]) -> SessionState:
        state = self._state(session_id)
        if not cluster_name or not isinstance(cluster_name, str):
            raise ServiceError("InvalidRequest", 400, "cluster_name must be a non-empty string")
        if not finding_ids:
            raise ServiceError("InvalidRequest", 400, "finding_ids must be non-empty")
        if not all(isinstance(fid, int) for fid in finding_ids):
            raise ServiceError("InvalidRequest", 400, "finding_ids must be integers")
        with self.lock(session_id):
            unknown = set(finding_ids) - state.dataset.ids()
            if unknown:
                raise ServiceError("UnknownFinding", 404, sorted(unknown))
            self._append(
                state, {"op": "assign", "cluster": cluster_name, "ids": sorted(set(finding_ids))}
            )
        return state

    def export_ground_truth(self, session_id: str) -> ClusterSet:
        state = self._state(session_id)
        with self.lock(session_id):
            unassigned = state.unassigned_ids()
            if unassigned:
                raise ServiceError("IncompleteAnnotation", 409, {"unassigned": unassigned})
            return ClusterSet(
                clusters=frozenset(
                    frozenset(members) for members in state.named_clusters.values()
                ),
                origin="ground_truth",
            )

    def open_review(self, session_id: str, predicted_raw: dict[str, Any]) -> SessionState:
        state = self._state(session_id)
        with self.lock(session_id):
            truth = self.export_ground_truth(session_id)  # raises if incomplete
            try:
                predicted = cluster_set_from_dict(predicted_raw)
            except MalformedClusterSet as exc:
                raise ServiceError("InvalidRequest", 400, str(exc)) from exc
            try:
                evaluate(predicted, truth)
            except SecdedupError as exc:
                raise ServiceError("UniverseMismatch", 409, str(exc)) from exc

            false_positives = sorted(
                (sorted(cluster) for cluster in predicted.clusters - truth.clusters),
                key=lambda c: (-len(c), c[0]),
            )
            items = []
            for cluster in false_positives:
                members = set(cluster)
                matched = max(
                    (sorted(t) for t in truth.clusters),
                    key=lambda t: (len(members & set(t)), -t[0]),
                )
                items.append(
                    ReviewItem(
                        predicted_cluster=cluster,
                        matched_truth=matched if members & set(matched) else None,
                    )
                )
            self._append(
                state,
                {
                    "op": "open_review",
                    "predicted": predicted.canonical(),
                    "items": [item.to_dict() for item in items],
                },
            )
        return state

    def tag_review(
        self, session_id: str, index: int, verdict: str, reasons: list[int]
    ) -> ReviewItem:
        state = self._state(session_id)
        with self.lock(session_id):
            if index < 0 or index >= len(state.review_items):
                raise ServiceError("UnknownItem", 404, index)
            if verdict not in VERDICTS or verdict == "pending":
                raise ServiceError("InvalidRequest", 400, f"bad verdict {verdict!r}")
            if not reasons or not all(isinstance(r, int) for r in reasons):
                raise ServiceError(
                    "InvalidRequest", 400, "reasons must be a non-empty list of integers"
                )
            known = self.reason_catalog()
            bad = sorted(set(reasons) - set(known))
            if bad:
                raise ServiceError("UnknownReason", 400, bad)
            item = state.review_items[index]
            if item.verdict != "pending":
                raise ServiceError("AlreadyTagged", 409, index)
            self._append(
                state,
                {"op": "tag", "index": index, "verdict": verdict, "reasons": sorted(set(reasons))},
            )
            return state.review_items[index]

    # ------------------------------------------------------------------
    # reasons
    # ------------------------------------------------------------------

    def reason_catalog(self) -> dict[int, str]:
        return {**BUILTIN_REASONS, **self._custom_reasons}

    def add_custom_reason(self, text: str) -> int:
        if not text or not isinstance(text, str):
            raise ServiceError("InvalidRequest", 400, "reason text must be a non-empty string")
        with self._store_lock:
            next_id = max(self._custom_reasons, default=CUSTOM_REASON_BASE - 1) + 1
            self._custom_reasons[next_id] = text
            self._save_reasons()
        return next_id

    # ------------------------------------------------------------------
    # read views
    # ------------------------------------------------------------------

    def summary(self, session_id: str) -> dict[str, Any]:
        state = self._state(session_id)
        return {
            "session_id": state.session_id,
            "testing_type": state.dataset.testing_type,
            "finding_count": len(state.dataset.findings),
            "clusters": {name: sorted(ids) for name, ids in sorted(state.named_clusters.items())},
            "unassigned_count": len(state.unassigned_ids()),
            "review_item_count": len(state.review_items),
            "created_at": state.created_at,
            "updated_at": state.updated_at,
        }

    def findings_view(self, session_id: str) -> list[dict[str, Any]]:
        state = self._state(session_id)
        return [
            {
                "id": finding.id,
                "tool": finding.tool,
                "text": state.display_text(finding),
                "cluster": state.cluster_of(finding.id),
            }
            for finding in sorted(state.dataset.findings, key=lambda f: f.id)
        ]

    def review_summary(self, session_id: str) -> dict[str, Any]:
        state = self._state(session_id)
        catalog = self.reason_catalog()
        counts: dict[int, int] = {}
        tagged = 0
        for item in state.review_items:
            if item.verdict != "pending":
                tagged += 1
                for reason in item.reasons:
                    counts[reason] = counts.get(reason, 0) + 1
        return {
            "total_items": len(state.review_items),
            "tagged": tagged,
            "pending": len(state.review_items) - tagged,
            "reasons": [
                {"reason_id": rid, "text": catalog.get(rid, ""), "count": counts.get(rid, 0)}
                for rid in sorted(set(catalog) | set(counts))
            ],
        }

    def diff(self, session_a: str, session_b: str) -> dict[str, Any]:
        state_a = self._state(session_a)
        state_b = self._state(session_b)
        if state_a.dataset.ids() != state_b.dataset.ids():
            raise ServiceError("UniverseMismatch", 409, "sessions cover different findings")
        disagreements = []
        for fid in sorted(state_a.dataset.ids()):
            name_a = state_a.cluster_of(fid)
            name_b = state_b.cluster_of(fid)
            members_a = state_a.named_clusters.get(name_a, set()) if name_a else set()
            members_b = state_b.named_clusters.get(name_b, set()) if name_b else set()
            if members_a != members_b:
                disagreements.append(
                    {"finding_id": fid, "a_cluster": name_a, "b_cluster": name_b}
                )
        return {"disagreements": disagreements, "count": len(disagreements)}
