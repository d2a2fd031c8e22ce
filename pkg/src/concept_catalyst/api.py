"""HTTP interface: every operation the web UI (or a test script) needs.

All state lives server-side; every mutating route answers with the full
post-mutation session representation (the same schema the snapshot files
use), so a follow-up GET returns an equal document and a page reload loses
nothing.
"""

from __future__ import annotations

import time
from contextlib import asynccontextmanager
from typing import Any, Optional

from fastapi import APIRouter, FastAPI, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import export, graph, ingest, llm, synthesis
from .config import ServiceConfig
from .errors import (
    CatalystError,
    InvalidRequestError,
    PayloadTooLargeError,
)
from .models import SessionState, Stage
from .store import SessionStore

__version__ = "0.1.0"

_STATUS_BY_CODE = {
    "not-found": 404,
    "duplicate-edge": 409,
    "generation-in-flight": 409,
    "id-collision": 409,
    "payload-too-large": 413,
    "provider-error": 502,
    "timeout": 502,
    "auth-failure": 502,
    "empty-completion": 502,
}


def _status_for(code: str) -> int:
    return _STATUS_BY_CODE.get(code, 400)


def _session_body(state: SessionState, result: Any = None) -> dict:
    body: dict[str, Any] = {"session": state.to_dict()}
    if result is not None:
        body["result"] = result
    return body


class StagePayload(BaseModel):
    stage: str


class SummaryPayload(BaseModel):
    text: str
    source: Optional[str] = None


class ConceptPayload(BaseModel):
    kind: str
    start: Optional[int] = None
    end: Optional[int] = None
    label: Optional[str] = None


class ConceptPatch(BaseModel):
    x: Optional[float] = None
    y: Optional[float] = None
    area: Optional[str] = None


class EdgePayload(BaseModel):
    a: str
    b: str


class ReviewPayload(BaseModel):
    verdict: str
    text: Optional[str] = None


def create_app(
    cfg: ServiceConfig,
    store: Optional[SessionStore] = None,
    provider: Optional[llm.Provider] = None,
) -> FastAPI:
    cfg.validate()
    cfg.ensure_data_dir()
    store = store or SessionStore(cfg.data_dir)
    started = time.monotonic()

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        store.flush_all()  # graceful shutdown re-persists everything

    app = FastAPI(title="Concept Catalyst", version=__version__, lifespan=lifespan)
    app.state.store = store
    app.state.cfg = cfg

    @app.exception_handler(CatalystError)
    def _domain_error(_request: Request, exc: CatalystError) -> JSONResponse:
        return JSONResponse(
            status_code=_status_for(exc.code),
            content={"error": exc.code, "message": exc.message},
        )

    @app.exception_handler(RequestValidationError)
    def _validation_error(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": "invalid-request", "message": str(exc.errors()[:1])},
        )

    @app.get("/healthz")
    def healthz() -> dict:
        # Liveness only: never calls the provider.
        return {
            "status": "ok",
            "version": __version__,
            "provider": cfg.provider.kind,
            "uptime_s": round(time.monotonic() - started, 3),
        }

    api = APIRouter(prefix="/api/v1")

    # -- sessions ------------------------------------------------------------

    @api.post("/sessions", status_code=201)
    def create_session() -> dict:
        return _session_body(store.create_session())

    @api.get("/sessions/{sid}")
    def get_session(sid: str) -> dict:
        return _session_body(store.get_session(sid))

    @api.post("/sessions/{sid}/stage")
    def set_stage(sid: str, payload: StagePayload) -> dict:
        try:
            target = Stage(payload.stage)
        except ValueError:
            raise InvalidRequestError(f"unknown stage {payload.stage!r}")
        return _session_body(store.set_stage(sid, target))

    # -- summary -------------------------------------------------------------

    @api.post("/sessions/{sid}/document")
    async def upload_document(sid: str, request: Request, file: UploadFile) -> dict:
        declared = request.headers.get("content-length")
        if declared and declared.isdigit() and int(declared) > cfg.max_upload_bytes + 8192:
            raise PayloadTooLargeError(
                f"upload exceeds the {cfg.max_upload_bytes} byte limit"
            )
        data = await file.read(cfg.max_upload_bytes + 1)
        if len(data) > cfg.max_upload_bytes:
            raise PayloadTooLargeError(
                f"upload exceeds the {cfg.max_upload_bytes} byte limit"
            )
        store.get_session(sid)  # 404 before any parsing work
        doc = ingest.UploadedDocument(filename=file.filename or "", data=data)
        raw_text = ingest.extract_text(doc)
        summary = ingest.request_summary(
            store, sid, raw_text, cfg.summary_target_words, cfg.provider, provider
        )
        return _session_body(store.get_session(sid), result={"summary": summary.to_dict()})

    @api.put("/sessions/{sid}/summary")
    def put_summary(sid: str, payload: SummaryPayload) -> dict:
        state = store.get_session(sid)
        if state.summary is None or payload.source == "typed":
            summary = ingest.set_summary_text(store, sid, payload.text)
        else:
            summary = ingest.edit_summary(store, sid, payload.text)
        return _session_body(store.get_session(sid), result={"summary": summary.to_dict()})

    @api.post("/sessions/{sid}/summary/approve")
    def approve_summary(sid: str) -> dict:
        return _session_body(ingest.approve_summary(store, sid))

    # -- concepts and edges ----------------------------------------------------

    @api.post("/sessions/{sid}/concepts", status_code=201)
    def create_concept(sid: str, payload: ConceptPayload) -> dict:
        if payload.kind == "highlight":
            if payload.start is None or payload.end is None:
                raise InvalidRequestError("highlight concepts need start and end offsets")
            concept = graph.create_concept_from_highlight(store, sid, payload.start, payload.end)
        elif payload.kind == "custom":
            concept = graph.create_custom_concept(store, sid, payload.label or "")
        else:
            raise InvalidRequestError(f"unknown concept kind {payload.kind!r}")
        return _session_body(store.get_session(sid), result={"concept": concept.to_dict()})

    @api.patch("/sessions/{sid}/concepts/{cid}")
    def patch_concept(sid: str, cid: str, payload: ConceptPatch) -> dict:
        if payload.area == "waiting":
            concept = graph.return_to_waiting(store, sid, cid)
        elif payload.x is not None and payload.y is not None:
            concept = graph.place_concept(store, sid, cid, payload.x, payload.y)
        else:
            raise InvalidRequestError("send either {x, y} or {area: 'waiting'}")
        return _session_body(store.get_session(sid), result={"concept": concept.to_dict()})

    @api.delete("/sessions/{sid}/concepts/{cid}")
    def delete_concept(sid: str, cid: str) -> dict:
        graph.remove_concept(store, sid, cid)
        return _session_body(store.get_session(sid))

    @api.post("/sessions/{sid}/edges", status_code=201)
    def create_edge(sid: str, payload: EdgePayload) -> dict:
        edge = graph.connect_concepts(store, sid, payload.a, payload.b)
        return _session_body(store.get_session(sid), result={"edge": edge.to_dict()})

    @api.delete("/sessions/{sid}/edges/{eid}")
    def delete_edge(sid: str, eid: str) -> dict:
        graph.disconnect(store, sid, eid)
        return _session_body(store.get_session(sid))

    # -- question groups ---------------------------------------------------------

    @api.post("/sessions/{sid}/groups", status_code=201)
    def create_group(sid: str) -> dict:
        group = synthesis.create_group(store, sid)
        return _session_body(store.get_session(sid), result={"group": group.to_dict()})

    @api.post("/sessions/{sid}/groups/{gid}/toggle/{cid}")
    def toggle_concept(sid: str, gid: str, cid: str) -> dict:
        group = synthesis.toggle_concept_in_group(store, sid, gid, cid)
        return _session_body(store.get_session(sid), result={"group": group.to_dict()})

    @api.post("/sessions/{sid}/groups/{gid}/generate")
    def generate(sid: str, gid: str) -> dict:
        questions = synthesis.generate_questions(
            store, sid, gid, cfg.provider, cfg.questions_per_group, provider
        )
        return _session_body(
            store.get_session(sid),
            result={"questions": [q.to_dict() for q in questions]},
        )

    @api.post("/sessions/{sid}/questions/{qid}/review")
    def review(sid: str, qid: str, payload: ReviewPayload) -> dict:
        question = synthesis.review_question(store, sid, qid, payload.verdict, payload.text)
        return _session_body(store.get_session(sid), result={"question": question.to_dict()})

    # -- bank and export -----------------------------------------------------------

    @api.get("/sessions/{sid}/bank")
    def bank(sid: str) -> dict:
        return {"bank": [q.to_dict() for q in synthesis.question_bank(store, sid)]}

    @api.get("/sessions/{sid}/export/preview")
    def export_preview(sid: str) -> dict:
        doc = export.build_preview(store, sid)
        return {"preview": doc.to_dict()}

    @api.get("/sessions/{sid}/export/txt")
    def export_txt(sid: str) -> PlainTextResponse:
        doc = export.build_preview(store, sid)
        text = export.render_plaintext(doc, include_summary=cfg.export_include_summary)
        return PlainTextResponse(text, media_type="text/plain; charset=utf-8")

    @api.get("/sessions/{sid}/export/pdf")
    def export_pdf(sid: str) -> Response:
        doc = export.build_preview(store, sid)
        data = export.render_pdf(
            doc, page_size=cfg.page_size, include_summary=cfg.export_include_summary
        )
        return Response(
            content=data,
            media_type="application/pdf",
            headers={"content-disposition": 'attachment; filename="questions.pdf"'},
        )

    app.include_router(api)

    if cfg.static_dir and cfg.static_dir.is_dir():
        app.mount("/", StaticFiles(directory=cfg.static_dir, html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index() -> str:
            return (
                "<!doctype html><title>Concept Catalyst</title>"
                "<h1>Concept Catalyst</h1>"
                "<p>The API lives under <code>/api/v1</code>; no UI bundle is configured "
                "(set <code>CC_STATIC_DIR</code> to serve one).</p>"
            )

    return app
