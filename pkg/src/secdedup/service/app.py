"""REST surface for the annotation workflow.

Thin HTTP wrapper over SessionStore: routes validate shapes, the store owns
the domain rules and persistence. All errors come back as
``{"error": code, "detail": ...}`` with a matching status code.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..ingest import load_default_catalog, load_schema_catalog
from .store import SNAPSHOT_EVERY, ServiceError, SessionStore
from .reasons import BUILTIN_REASONS


def create_app(
    data_dir: str | Path,
    snapshot_every: int = SNAPSHOT_EVERY,
    catalog_path: str | Path | None = None,
) -> FastAPI:
    if catalog_path is not None:
        mappings = load_schema_catalog(catalog_path)
    else:
        mappings = load_default_catalog()
    store = SessionStore(
        data_dir,
        snapshot_every=snapshot_every,
        catalog={m.tool_name: m for m in mappings},
    )

    app = FastAPI(title="secdedup annotation service", docs_url=None, redoc_url=None)
    app.state.store = store

    @app.exception_handler(ServiceError)
    async def _service_error(_request: Request, exc: ServiceError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status, content={"error": exc.code, "detail": exc.detail}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(
        _request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"error": "InvalidRequest", "detail": str(exc)}
        )

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    # -- reasons ---------------------------------------------------------

    @app.get("/reasons")
    def list_reasons() -> dict[str, Any]:
        return {
            "reasons": [
                {"reason_id": rid, "text": text, "builtin": rid in BUILTIN_REASONS}
                for rid, text in sorted(store.reason_catalog().items())
            ]
        }

    @app.post("/reasons", status_code=201)
    def add_reason(payload: dict[str, Any] = Body(...)) -> dict[str, int]:
        return {"reason_id": store.add_custom_reason(payload.get("text", ""))}

    # -- sessions --------------------------------------------------------

    @app.get("/sessions")
    def list_sessions() -> dict[str, Any]:
        return {"sessions": [store.summary(sid) for sid in store.session_ids()]}

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        if "reports" in payload:
            reports = payload["reports"]
            testing_type = payload.get("testing_type", "")
            if not isinstance(reports, list):
                raise ServiceError("InvalidRequest", 400, "'reports' must be an array")
            state = store.create_session_from_reports(reports, testing_type)
        else:
            state = store.create_session(payload)
        return store.summary(state.session_id)

    @app.get("/sessions/{session_id}")
    def session_summary(session_id: str) -> dict[str, Any]:
        return store.summary(session_id)

    @app.get("/sessions/{session_id}/findings")
    def session_findings(session_id: str) -> dict[str, Any]:
        return {"findings": store.findings_view(session_id)}

    @app.post("/sessions/{session_id}/reports")
    def add_report(session_id: str, payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        store.add_report(session_id, payload)
        return store.summary(session_id)

    @app.post("/sessions/{session_id}/assign")
    def assign(session_id: str, payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        finding_ids = payload.get("finding_ids")
        if not isinstance(finding_ids, list):
            raise ServiceError("InvalidRequest", 400, "'finding_ids' must be an array")
        store.assign(session_id, payload.get("cluster_name", ""), finding_ids)
        return store.summary(session_id)

    @app.get("/sessions/{session_id}/unassigned")
    def unassigned(session_id: str) -> dict[str, Any]:
        state = store._state(session_id)
        return {"unassigned": state.unassigned_ids()}

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str) -> dict[str, Any]:
        return store.export_ground_truth(session_id).to_dict()

    # -- review ----------------------------------------------------------

    @app.post("/sessions/{session_id}/review")
    def open_review(session_id: str, payload: dict[str, Any] = Body(...)) -> dict[str, Any]:
        state = store.open_review(session_id, payload)
        return {"items": [item.to_dict() for item in state.review_items]}

    @app.get("/sessions/{session_id}/review")
    def review_items(session_id: str) -> dict[str, Any]:
        state = store._state(session_id)
        return {"items": [item.to_dict() for item in state.review_items]}

    @app.post("/sessions/{session_id}/review/{index}/tag")
    def tag_review(
        session_id: str, index: int, payload: dict[str, Any] = Body(...)
    ) -> dict[str, Any]:
        reasons = payload.get("reasons")
        if not isinstance(reasons, list):
            raise ServiceError("InvalidRequest", 400, "'reasons' must be an array")
        item = store.tag_review(session_id, index, payload.get("verdict", ""), reasons)
        return item.to_dict()

    @app.get("/sessions/{session_id}/review/summary")
    def review_summary(session_id: str) -> dict[str, Any]:
        return store.review_summary(session_id)

    # -- cross-session ----------------------------------------------------

    @app.get("/sessions/{session_a}/diff/{session_b}")
    def diff(session_a: str, session_b: str) -> dict[str, Any]:
        return store.diff(session_a, session_b)

    return app
