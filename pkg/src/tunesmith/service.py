"""HTTP facade over the dialogue engine.

Handlers are deliberately thin: everything behavioural lives in the
modules underneath, this layer only maps results and errors onto status
codes and a uniform ``{code, message}`` error envelope. Upstream model
errors are sanitized so neither the API key nor full provider bodies
ever reach a client.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import AppConfig, make_backend
from .corpus import load_index
from .dialogue import DialogueEngine, Session, TurnResult
from .errors import (
    DialogueError,
    LlmError,
    MaxTurnsExceeded,
    ParseError,
    TurnInFlight,
)
from .retrieval import RankedCandidate, RetrievalConfig, extract_tags, rank
from .notation import validate, parse_tune

__all__ = ["create_app", "app_from_config"]

logger = logging.getLogger("tunesmith.service")


class _MessageIn(BaseModel):
    text: str = Field(min_length=1)


class _ValidateIn(BaseModel):
    abc: str = Field(min_length=1)


class _RetrieveIn(BaseModel):
    text: Optional[str] = None
    tags: Optional[list[str]] = None
    k: Optional[int] = Field(default=None, ge=1)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def _issue_json(issues) -> list[dict[str, Any]]:
    return [
        {
            "severity": i.severity.value,
            "code": i.code.value,
            "detail": i.detail,
            "bar_index": i.bar_index,
        }
        for i in issues
    ]


def _candidate_json(engine: DialogueEngine, c: RankedCandidate) -> dict[str, Any]:
    from .retrieval import fraction_to_decimal

    entry = engine.index.entries[c.entry_id]
    return {
        "id": c.entry_id,
        "title": entry.title,
        "similarity": fraction_to_decimal(c.similarity),
        "matched_tags": sorted(c.matched_tags),
    }


def _turn_json(engine: DialogueEngine, result: TurnResult) -> dict[str, Any]:
    return {
        "request": result.request,
        "tags": sorted(result.tags),
        "commentary": result.commentary,
        "abc": result.tune_text if result.tune is not None else None,
        "raw_reply": result.raw_reply,
        "issues": _issue_json(result.issues),
        "retrieved": [_candidate_json(engine, c) for c in result.candidates],
        "duplicate_of": result.duplicate_of,
        "reprompted": result.reprompted,
    }


class _SessionStore:
    def __init__(self, max_sessions: int) -> None:
        self.max_sessions = max_sessions
        self._sessions: dict[str, Session] = {}
        self._mutex = threading.Lock()

    def add(self, session: Session) -> bool:
        with self._mutex:
            if len(self._sessions) >= self.max_sessions:
                return False
            self._sessions[session.id] = session
            return True

    def get(self, session_id: str) -> Session | None:
        with self._mutex:
            return self._sessions.get(session_id)


def create_app(engine: DialogueEngine, max_sessions: int = 64) -> FastAPI:
    app = FastAPI(title="tunesmith", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = _SessionStore(max_sessions)
    app.state.engine = engine
    app.state.sessions = store

    @app.exception_handler(RequestValidationError)
    async def _on_validation(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        where = ".".join(str(p) for p in first.get("loc", ()))
        return _error(422, "invalid_request", f"{where}: {first.get('msg', 'invalid')}")

    @app.exception_handler(LlmError)
    async def _on_llm_error(request: Request, exc: LlmError):
        # Class name plus our own message only; provider bodies stay out.
        return _error(502, "upstream_error", f"{type(exc).__name__}: {exc}")

    @app.exception_handler(TurnInFlight)
    async def _on_turn_in_flight(request: Request, exc: TurnInFlight):
        return _error(409, "turn_in_flight", str(exc))

    @app.exception_handler(MaxTurnsExceeded)
    async def _on_max_turns(request: Request, exc: MaxTurnsExceeded):
        return _error(409, "max_turns_exceeded", str(exc))

    @app.exception_handler(DialogueError)
    async def _on_dialogue_error(request: Request, exc: DialogueError):
        return _error(500, "dialogue_error", str(exc))

    @app.get("/healthz")
    def healthz() -> dict[str, Any]:
        return {"status": "ok", "entries": len(engine.index.entries)}

    @app.post("/api/sessions", status_code=201)
    def create_session():
        session = engine.new_session()
        if not store.add(session):
            return _error(503, "max_sessions", "session limit reached, retry later")
        return {"session_id": session.id}

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        session = store.get(session_id)
        if session is None:
            return _error(404, "not_found", f"no session {session_id}")
        return {
            "session_id": session.id,
            "created_at": session.created_at,
            "transcript": [
                {"role": m.role, "content": m.content} for m in session.transcript
            ],
            "turns": [_turn_json(engine, r) for r in session.results],
        }

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(session_id: str, body: _MessageIn):
        session = store.get(session_id)
        if session is None:
            return _error(404, "not_found", f"no session {session_id}")
        started = time.monotonic()
        result = engine.handle_request(session, body.text)
        logger.info(
            "turn %s",
            json.dumps(
                {
                    "session": session.id,
                    "tags": sorted(result.tags),
                    "retrieved": [c.entry_id for c in result.candidates],
                    "duplicate_of": result.duplicate_of,
                    "latency_ms": round((time.monotonic() - started) * 1000, 1),
                },
                sort_keys=True,
            ),
        )
        return _turn_json(engine, result)

    @app.post("/api/validate")
    def validate_abc(body: _ValidateIn):
        try:
            tune = parse_tune(body.abc)
        except ParseError as exc:
            return _error(400, "parse_error", str(exc))
        return {"issues": _issue_json(validate(tune))}

    @app.post("/api/retrieve")
    def retrieve(body: _RetrieveIn):
        if (body.text is None) == (body.tags is None):
            return _error(
                400, "invalid_request", "provide exactly one of 'text' or 'tags'"
            )
        cfg = RetrievalConfig(k=body.k) if body.k else engine.retrieval_cfg
        if body.tags is not None:
            from .corpus import normalize_tag

            tags = frozenset(t for t in (normalize_tag(t) for t in body.tags) if t)
        else:
            extraction = extract_tags(
                body.text,
                engine.index.vocabulary_by_family,
                engine.retrieval_backend,
                engine.retrieval_model,
                engine.templates["retrieval_system"],
            )
            tags = extraction.tags
        candidates = rank(tags, engine.index, cfg)
        return {
            "tags": sorted(tags),
            "candidates": [_candidate_json(engine, c) for c in candidates],
        }

    @app.get("/api/corpus/tags")
    def corpus_tags():
        return {
            family: list(tags)
            for family, tags in engine.index.vocabulary_by_family.items()
        }

    return app


def app_from_config(cfg: AppConfig) -> FastAPI:
    index = load_index(cfg.index_path)
    backend = make_backend(cfg.backend)
    engine = DialogueEngine(
        index=index,
        retrieval_backend=backend,
        composer_backend=backend,
        retrieval_model=cfg.retrieval_model,
        composer_model=cfg.composer_model,
        retrieval_cfg=RetrievalConfig(k=cfg.k),
        max_turns=cfg.max_turns,
        templates=cfg.load_templates(),
    )
    return create_app(engine, max_sessions=cfg.service.max_sessions)
