"""HTTP facade over interactive design sessions.

A FastAPI application wrapping the session state machine: lifecycle
endpoints, synchronous suggestion rounds, and log/final-screen export.
Every session persists as one JSON-lines journal file under the data
directory; state is rebuilt by replaying that file, which doubles as
crash recovery.  Suggestion generation runs synchronously inside the
request (a full run takes seconds at this problem size), so mutations
on one session are serialized by a per-session exclusive guard.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .evolution import GAParams, PaddingExhaustedError
from .grid import GridMap, MapError, parse_map, serialize_map
from .session import (
    Decision,
    EmptyUserIdError,
    InvalidMapError,
    NotAtStartError,
    Session,
    SessionCompleteError,
    SessionError,
    SessionIncompleteError,
    UnknownSuggestionIndexError,
    blank_event,
    completed_event,
    created_event,
    export_final_screen,
    export_log,
    initial_event,
    iterate,
    iterate_event,
    new_session,
    replay_session,
    submit_blank,
    submit_initial,
)


class UnknownSessionError(SessionError):
    pass


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: Path
    budget: int | None = None
    default_seed: int | None = None


class SessionStore:
    """Journal-backed session registry with per-session exclusive guards."""

    def __init__(self, config: ServiceConfig) -> None:
        self.config = config
        config.data_dir.mkdir(parents=True, exist_ok=True)
        self._registry = threading.Lock()
        self._guards: dict[str, threading.RLock] = {}
        self._cache: dict[str, Session] = {}

    def _guard(self, session_id: str) -> threading.RLock:
        with self._registry:
            guard = self._guards.get(session_id)
            if guard is None:
                guard = self._guards[session_id] = threading.RLock()
            return guard

    def _path(self, session_id: str) -> Path:
        return self.config.data_dir / f"{session_id}.jsonl"

    def _params(self) -> GAParams:
        if self.config.budget is None:
            return GAParams()
        return GAParams(evaluation_budget=self.config.budget)

    def _append(self, session_id: str, event: dict) -> None:
        with self._path(session_id).open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(event) + "\n")

    def _load(self, session_id: str) -> Session:
        """Return the cached session or replay its journal.  The caller
        must hold the session guard."""
        session = self._cache.get(session_id)
        if session is not None:
            return session
        path = self._path(session_id)
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except FileNotFoundError:
            raise UnknownSessionError(f"no session {session_id!r}") from None
        session = replay_session([json.loads(line) for line in lines])
        self._cache[session_id] = session
        return session

    def create(self, user_id: str, seed: int | None) -> Session:
        if seed is None:
            seed = self.config.default_seed
        if seed is None:
            seed = secrets.randbits(63)
        session = new_session(user_id, seed, params=self._params())
        with self._guard(session.id):
            self._append(session.id, created_event(session))
            self._cache[session.id] = session
        return session

    def read(self, session_id: str) -> Session:
        with self._guard(session_id):
            return self._load(session_id)

    def initial(self, session_id: str, grid: GridMap) -> tuple[Session, list[GridMap]]:
        with self._guard(session_id):
            session = self._load(session_id)
            suggestions = submit_initial(session, grid)
            self._append(session_id, initial_event(grid))
            return session, suggestions

    def iterate(
        self, session_id: str, decisions: list[Decision]
    ) -> tuple[Session, list[GridMap] | None]:
        with self._guard(session_id):
            session = self._load(session_id)
            suggestions = iterate(session, decisions)
            self._append(session_id, iterate_event(decisions))
            if session.complete:
                self._append(session_id, completed_event())
            return session, suggestions

    def blank(self, session_id: str, grid: GridMap) -> Session:
        with self._guard(session_id):
            session = self._load(session_id)
            submit_blank(session, grid)
            self._append(session_id, blank_event(grid))
            if session.complete:
                self._append(session_id, completed_event())
            return session


# ---------------------------------------------------------------------------
# request and response shapes


class ApiMap(BaseModel):
    rows: list[str]


class CreateSessionRequest(BaseModel):
    user_id: str
    seed: int | None = None


class InitialRequest(BaseModel):
    map: ApiMap


class DecisionRequest(BaseModel):
    index: int
    map: ApiMap
    liked: bool = False
    kept: bool = False


class IterateRequest(BaseModel):
    decisions: list[DecisionRequest] = []


class BlankRequest(BaseModel):
    map: ApiMap


def _grid(payload: ApiMap) -> GridMap:
    return parse_map("\n".join(payload.rows))


def _rows(grid: GridMap) -> dict:
    return {"rows": serialize_map(grid).splitlines()}


def _state(session: Session) -> dict:
    return {
        "session_id": session.id,
        "user_id": session.user_id,
        "iteration": session.iteration,
        "complete": session.complete,
        "levels": [_rows(grid) for grid in session.levels],
        "suggestions": [
            {"original": _rows(slot.original), "current": _rows(slot.current)}
            for slot in session.current_suggestions
        ],
    }


_ERROR_STATUS: list[tuple[type[Exception], int, str]] = [
    (EmptyUserIdError, 422, "empty_user_id"),
    (UnknownSuggestionIndexError, 422, "unknown_suggestion_index"),
    (InvalidMapError, 422, "invalid_map"),
    (NotAtStartError, 409, "not_at_start"),
    (SessionCompleteError, 409, "session_complete"),
    (SessionIncompleteError, 409, "session_incomplete"),
    (UnknownSessionError, 404, "unknown_session"),
    (MapError, 422, "invalid_map"),
    (PaddingExhaustedError, 500, "padding_exhausted"),
]


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="levelforge", docs_url=None, redoc_url=None)
    store = SessionStore(config)
    app.state.store = store

    def handler(status: int, code: str):
        def handle(request: Request, exc: Exception) -> JSONResponse:
            return JSONResponse(
                status_code=status, content={"code": code, "message": str(exc)}
            )

        return handle

    for exc_type, status, code in _ERROR_STATUS:
        app.add_exception_handler(exc_type, handler(status, code))

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionRequest) -> dict:
        session = store.create(body.user_id, body.seed)
        return {
            "session_id": session.id,
            "iteration": session.iteration,
            "levels": [],
            "complete": False,
        }

    @app.post("/api/sessions/{session_id}/initial")
    def initial(session_id: str, body: InitialRequest) -> dict:
        session, suggestions = store.initial(session_id, _grid(body.map))
        return {
            "suggestions": [_rows(grid) for grid in suggestions],
            "iteration": session.iteration,
            "levels": [_rows(grid) for grid in session.levels],
        }

    @app.post("/api/sessions/{session_id}/iterate")
    def iterate_round(session_id: str, body: IterateRequest) -> dict:
        decisions = [
            Decision(
                index=entry.index,
                edited=_grid(entry.map),
                liked=entry.liked,
                kept=entry.kept,
            )
            for entry in body.decisions
        ]
        session, suggestions = store.iterate(session_id, decisions)
        if session.complete:
            return {
                "complete": True,
                "levels": [_rows(grid) for grid in session.levels],
            }
        assert suggestions is not None
        return {
            "complete": False,
            "suggestions": [_rows(grid) for grid in suggestions],
            "iteration": session.iteration,
        }

    @app.post("/api/sessions/{session_id}/blank")
    def blank(session_id: str, body: BlankRequest) -> dict:
        session = store.blank(session_id, _grid(body.map))
        return _state(session)

    @app.get("/api/sessions/{session_id}")
    def state(session_id: str) -> dict:
        return _state(store.read(session_id))

    @app.get("/api/sessions/{session_id}/log")
    def log(session_id: str) -> dict:
        return export_log(store.read(session_id))

    @app.get("/api/sessions/{session_id}/export")
    def export(session_id: str) -> PlainTextResponse:
        return PlainTextResponse(export_final_screen(store.read(session_id)))

    return app
