"""HTTP session service: live conversations, screening, registry management.

Turn handling is atomic: all backend calls happen before the session is
mutated, so a failed turn leaves the transcript and profile untouched.
The registry sits behind a versioned holder; PUT /references validates the
document and swaps it in one step (optimistic concurrency via If-Match),
while in-flight screenings keep using the snapshot they started with.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import Body, FastAPI, Header, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .backends import generate_reply, sample_emotions
from .codec import ConversationTurn
from .emotions import argmax_emotion
from .errors import (
    AllSamplesDiscardedError,
    BackendUnavailableError,
    EmptyCorpusError,
    EmptySessionError,
    MissingPolarityClassError,
    SchemaViolationError,
    UnknownSessionError,
)
from .references import CorpusPost, ReferenceRegistry, post_embedding
from .screening import screen
from .sessions import SessionStore


class RegistryHolder:
    """Versioned, swap-on-write registry shared across requests."""

    def __init__(self, registry: ReferenceRegistry | None = None) -> None:
        self._registry = registry
        self._version = 1 if registry is not None else 0
        self._lock = threading.Lock()

    def snapshot(self) -> tuple[ReferenceRegistry | None, int]:
        with self._lock:
            return self._registry, self._version

    def swap(self, registry: ReferenceRegistry, expected_version: int | None) -> int:
        with self._lock:
            if expected_version is not None and expected_version != self._version:
                raise _Conflict(f"registry version is {self._version}, not {expected_version}")
            self._registry = registry
            self._version += 1
            return self._version


class _Conflict(Exception):
    pass


def _screening_snapshot(profile, registry: ReferenceRegistry | None):
    if registry is None:
        return None
    try:
        return screen(profile, registry).to_json()
    except MissingPolarityClassError:
        return None


def create_app(
    backend,
    registry: ReferenceRegistry | None = None,
    store: SessionStore | None = None,
    ui_dir: Path | str | None = None,
) -> FastAPI:
    app = FastAPI(title="emoprofile session service")
    sessions = store if store is not None else SessionStore()
    holder = RegistryHolder(registry)

    @app.post("/sessions")
    def create_session() -> dict:
        session = sessions.create()
        return {"session_id": session.id}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return _get(session_id).export()

    @app.post("/sessions/{session_id}/turns")
    def post_turn(session_id: str, body: dict = Body(...)) -> dict:
        text = str(body.get("text", ""))
        if not text.strip():
            raise HTTPException(status_code=422, detail="text must be non-empty")
        session = _get(session_id)
        with sessions.lock(session_id):
            history = session.completed_turns()
            try:
                samples = sample_emotions(backend, history, text)
                turn_emotion = argmax_emotion(samples)
                reply = generate_reply(backend, history, text, turn_emotion)
            except BackendUnavailableError as exc:
                raise HTTPException(status_code=502, detail=str(exc)) from None
            except AllSamplesDiscardedError as exc:
                raise HTTPException(
                    status_code=422,
                    detail=f"no in-vocabulary emotion sampled ({exc.discarded} discarded)",
                ) from None
            turn = ConversationTurn(prompt=text, emotion=turn_emotion, response=reply)
            sessions.add_turn(session_id, turn, samples)
            profile = session.profile()
            snapshot, _ = holder.snapshot()
            return {
                "predicted_emotion": session.conversation_emotion(),
                "emotion_samples": list(samples.samples),
                "reply": reply,
                "profile": profile.distribution.as_list(),
                "screening": _screening_snapshot(profile, snapshot),
                "turn_index": len(session.turns) - 1,
            }

    @app.get("/sessions/{session_id}/profile")
    def get_profile(session_id: str) -> dict:
        session = _get(session_id)
        try:
            profile = session.profile()
        except EmptySessionError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        return {
            "profile": profile.distribution.as_list(),
            "prompt_count": profile.prompt_count,
            "predicted_emotion": session.conversation_emotion(),
        }

    @app.get("/sessions/{session_id}/screening")
    def get_screening(session_id: str) -> dict:
        session = _get(session_id)
        try:
            profile = session.profile()
        except EmptySessionError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        snapshot, _ = holder.snapshot()
        if snapshot is None:
            raise HTTPException(status_code=409, detail="no registry loaded")
        try:
            return screen(profile, snapshot).to_json()
        except MissingPolarityClassError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None

    @app.get("/references")
    def get_references() -> dict:
        snapshot, version = holder.snapshot()
        return {
            "version": version,
            "registry": snapshot.to_json() if snapshot is not None else None,
        }

    @app.put("/references")
    def put_references(
        body: dict = Body(...), if_match: str | None = Header(default=None)
    ) -> dict:
        try:
            new_registry = ReferenceRegistry.from_json(body)
        except SchemaViolationError as exc:
            raise HTTPException(
                status_code=422, detail={"path": exc.path, "message": str(exc)}
            ) from None
        expected = None
        if if_match is not None:
            try:
                expected = int(if_match.strip('"'))
            except ValueError:
                raise HTTPException(status_code=422, detail="If-Match must be a version integer")
        try:
            version = holder.swap(new_registry, expected)
        except _Conflict as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        return {"version": version, "references": new_registry.names()}

    @app.post("/screen")
    def screen_text(body: dict = Body(...)) -> dict:
        text = str(body.get("text", ""))
        if not text.strip():
            raise HTTPException(status_code=422, detail="text must be non-empty")
        snapshot, _ = holder.snapshot()
        if snapshot is None:
            raise HTTPException(status_code=409, detail="no registry loaded")
        try:
            embedding = post_embedding(CorpusPost(id="adhoc", text=text), backend)
            return screen(embedding, snapshot).to_json()
        except BackendUnavailableError as exc:
            raise HTTPException(status_code=502, detail=str(exc)) from None
        except (EmptyCorpusError, AllSamplesDiscardedError, MissingPolarityClassError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None

    def _get(session_id: str):
        try:
            return sessions.get(session_id)
        except UnknownSessionError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None

    @app.exception_handler(UnknownSessionError)
    def _unknown_session(_request, exc: UnknownSessionError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
