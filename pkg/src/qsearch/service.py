"""HTTP facade: galleries and live question-answer sessions as a JSON API.

The service holds galleries and sessions in memory, keyed by short ids.
Session mutations are serialised per session id; completed sessions flush
their transcript to disk immediately and unfinished ones are flushed on
shutdown. Every response number originates from the same engine the CLI
uses, so a session driven over HTTP produces a transcript byte-identical
to an in-process run fed the same answers.
"""

from __future__ import annotations

import hashlib
import json
import threading
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .constraints import ConstraintSet
from .errors import QSearchError
from .gallery import Gallery, GalleryConfig, gallery_from_json, gallery_to_json, generate_gallery
from .scorer import ScorerSpec, score_gallery
from .session import SessionState, start_session, submit_answer

__all__ = ["create_app", "serve"]


class _Store:
    def __init__(self, transcript_dir: str | None = None) -> None:
        self.galleries: dict[str, Gallery] = {}
        self.gallery_docs: dict[str, dict] = {}
        self.sessions: dict[str, SessionState] = {}
        self.session_gallery: dict[str, str] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.flushed: set[str] = set()
        self.counter = 0
        self.transcript_dir = Path(transcript_dir) if transcript_dir else None
        self.mutex = threading.Lock()

    def new_session_id(self) -> str:
        with self.mutex:
            self.counter += 1
            return f"s{self.counter:04d}"

    def flush_transcript(self, session_id: str) -> None:
        if self.transcript_dir is None or session_id in self.flushed:
            return
        state = self.sessions.get(session_id)
        if state is None:
            return
        self.transcript_dir.mkdir(parents=True, exist_ok=True)
        path = self.transcript_dir / f"{session_id}.jsonl"
        path.write_text(state.transcript.to_jsonl(), encoding="utf-8")
        self.flushed.add(session_id)

    def flush_all(self) -> None:
        for session_id in list(self.sessions):
            self.flush_transcript(session_id)


def _error(status: int, message: str, **extra) -> JSONResponse:
    detail = {"message": message}
    detail.update(extra)
    return JSONResponse(status_code=status, content={"detail": detail})


def _gallery_id(doc: dict) -> str:
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return "g" + hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def _question_payload(state: SessionState) -> dict | None:
    pending = state.pending_question
    if pending is None:
        return None
    question = state.gallery.schema.question(pending)
    return {"id": question.id, "prompt": question.prompt}


def _topk_payload(state: SessionState) -> list[dict]:
    if state.affinities is None:
        scores = score_gallery(state.scorer, state.constraints, state.gallery)
    else:
        scores = state.affinities
    return [
        {"image_id": image_id, "score": float(scores[image_id - 1])}
        for image_id in state.topk()
    ]


def _answer_payload(state: SessionState) -> dict:
    return {
        "entropy": state.entropy_trace[-1] if state.entropy_trace else None,
        "topk": _topk_payload(state),
        "done": state.done,
        "stop_reason": state.stop_reason,
        "next_question": _question_payload(state),
    }


def _session_view(session_id: str, gallery_id: str, state: SessionState) -> dict:
    return {
        "session_id": session_id,
        "gallery_id": gallery_id,
        "version": __version__,
        "status": state.status,
        "done": state.done,
        "stop_reason": state.stop_reason,
        "budget": state.budget,
        "k": state.k_display,
        "order": list(state.order),
        "asked": list(state.asked),
        "entropy": state.entropy_trace[-1] if state.entropy_trace else None,
        "entropy_trace": list(state.entropy_trace),
        "constraints": state.constraints.to_json(),
        "topk": _topk_payload(state),
        "next_question": _question_payload(state),
        "events": list(state.transcript.events),
    }


def create_app(transcript_dir: str | None = None) -> FastAPI:
    store = _Store(transcript_dir)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        store.flush_all()

    app = FastAPI(title="qsearch", version=__version__, lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.store = store

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return _error(400, "malformed request body", errors=exc.errors())

    @app.exception_handler(json.JSONDecodeError)
    async def bad_json(request: Request, exc: json.JSONDecodeError):
        return _error(400, f"invalid JSON body: {exc.msg}")

    @app.post("/api/v1/galleries", status_code=201)
    async def create_gallery(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError as exc:
            return _error(400, f"invalid JSON body: {exc.msg}")
        if not isinstance(body, dict):
            return _error(400, "expected a JSON object")
        try:
            if "generate" in body:
                params = body["generate"]
                if not isinstance(params, dict):
                    return _error(400, "'generate' must be an object", field="generate")
                seed = int(params.get("seed", 0))
                config = GalleryConfig(
                    n=int(params.get("n", 0)),
                    n_identities=int(params.get("identities", params.get("n", 0))),
                )
                gallery = generate_gallery(config, seed)
            else:
                gallery = gallery_from_json(body, where="body")
        except QSearchError as exc:
            return _error(400, str(exc))
        except (TypeError, ValueError) as exc:
            return _error(400, f"malformed gallery body: {exc}")
        doc = gallery_to_json(gallery)
        gallery_id = _gallery_id(doc)
        store.galleries[gallery_id] = gallery
        store.gallery_docs[gallery_id] = doc
        return JSONResponse(
            status_code=201,
            content={
                "gallery_id": gallery_id,
                "version": __version__,
                "seed": gallery.seed,
                "n": gallery.n,
                "identities": gallery.n_identities,
            },
        )

    @app.get("/api/v1/galleries/{gallery_id}")
    async def get_gallery(gallery_id: str):
        doc = store.gallery_docs.get(gallery_id)
        if doc is None:
            return _error(404, f"unknown gallery {gallery_id!r}")
        return {"gallery_id": gallery_id, **doc}

    @app.post("/api/v1/sessions", status_code=201)
    async def create_session(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError as exc:
            return _error(400, f"invalid JSON body: {exc.msg}")
        if not isinstance(body, dict):
            return _error(400, "expected a JSON object")
        for field in ("gallery_id", "budget", "order"):
            if field not in body:
                return _error(400, f"missing required field {field!r}", field=field)
        gallery = store.galleries.get(body["gallery_id"])
        if gallery is None:
            return _error(404, f"unknown gallery {body['gallery_id']!r}")
        try:
            scorer = ScorerSpec.from_json(body.get("scorer", {"kind": "ideal"}))
            state = start_session(
                gallery,
                scorer,
                order=[int(q) for q in body["order"]],
                budget=float(body["budget"]),
                k_display=int(body.get("k", 5)),
                target_identity=(
                    int(body["target_identity"]) if body.get("target_identity") is not None else None
                ),
                seed=int(body.get("seed", 0)),
            )
        except QSearchError as exc:
            return _error(400, str(exc))
        except (TypeError, ValueError) as exc:
            return _error(400, f"malformed session body: {exc}")
        session_id = store.new_session_id()
        store.sessions[session_id] = state
        store.session_gallery[session_id] = body["gallery_id"]
        store.locks[session_id] = threading.Lock()
        return JSONResponse(
            status_code=201,
            content={
                "session_id": session_id,
                "gallery_id": body["gallery_id"],
                "version": __version__,
                "done": False,
                "budget": state.budget,
                "k": state.k_display,
                "next_question": _question_payload(state),
            },
        )

    @app.get("/api/v1/sessions/{session_id}")
    async def get_session(session_id: str):
        state = store.sessions.get(session_id)
        if state is None:
            return _error(404, f"unknown session {session_id!r}")
        return _session_view(session_id, store.session_gallery[session_id], state)

    @app.post("/api/v1/sessions/{session_id}/answer")
    async def answer(session_id: str, request: Request):
        state = store.sessions.get(session_id)
        if state is None:
            return _error(404, f"unknown session {session_id!r}")
        try:
            body = await request.json()
        except json.JSONDecodeError as exc:
            return _error(400, f"invalid JSON body: {exc.msg}")
        if not isinstance(body, dict) or "question_id" not in body:
            return _error(400, "missing required field 'question_id'", field="question_id")
        with store.locks[session_id]:
            if state.done:
                return _error(409, f"session {session_id} is already done")
            if int(body["question_id"]) != state.pending_question:
                return _error(
                    400,
                    f"expected answer to question {state.pending_question}, "
                    f"got {body['question_id']}",
                    field="question_id",
                )
            try:
                constraints = ConstraintSet.from_json(body.get("constraints", {}))
                submit_answer(state, constraints)
            except QSearchError as exc:
                return _error(400, str(exc))
            if state.done:
                store.flush_transcript(session_id)
            return _answer_payload(state)

    return app


def serve(port: int = 8000, host: str = "127.0.0.1", transcript_dir: str | None = None) -> None:
    """Run the service until interrupted; flushes transcripts on shutdown."""
    import uvicorn

    uvicorn.run(create_app(transcript_dir), host=host, port=port, log_level="info")
