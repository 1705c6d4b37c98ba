"""Conversation sessions with incremental emotional-profile accumulation.

Each turn's sample set is normalized to a distribution and added to a
running sum, so every prompt carries equal weight in the profile no matter
how many of its samples survived vocabulary filtering.  The profile is the
running sum divided by the number of contributing prompts, and always
equals a batch recomputation from the stored sample sets.

Sessions persist as append-only JSONL event logs (one file per session) so
a store can recover state by replay.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .codec import ConversationTurn
from .emotions import (
    VOCABULARY_SIZE,
    EmotionDistribution,
    EmotionSampleSet,
    argmax_emotion,
    distribution_from_counts,
)
from .errors import EmptySessionError, UnknownSessionError


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class EmotionalProfile:
    """Per-conversation (or per-corpus) average emotion distribution."""

    distribution: EmotionDistribution
    prompt_count: int
    source: str

    def __post_init__(self) -> None:
        if self.prompt_count < 1:
            raise ValueError("prompt_count must be >= 1")


@dataclass
class ConversationSession:
    """Turn history plus the incrementally maintained profile accumulator.

    ``accumulated`` sums one normalized distribution per turn with valid
    samples; ``prompt_count`` counts exactly those turns.  Turns whose
    samples were all discarded are kept in the transcript but excluded
    from the accumulation.
    """

    id: str
    turns: list[tuple[ConversationTurn, EmotionSampleSet]] = field(default_factory=list)
    prompt_count: int = 0
    accumulated: np.ndarray = field(
        default_factory=lambda: np.zeros(VOCABULARY_SIZE, dtype=np.float64)
    )
    created_at: str = field(default_factory=_now)
    updated_at: str = field(default_factory=_now)

    def add_turn(self, turn: ConversationTurn, samples: EmotionSampleSet) -> "ConversationSession":
        """Append a turn; accumulate its normalized samples if any survived."""
        if len(samples) > 0:
            self.accumulated = self.accumulated + distribution_from_counts(samples.counts()).weights
            self.prompt_count += 1
        self.turns.append((turn, samples))
        self.updated_at = _now()
        return self

    def profile(self) -> EmotionalProfile:
        """Average of the per-turn distributions; raises on empty sessions."""
        if self.prompt_count < 1:
            raise EmptySessionError(f"session {self.id} has no accumulated samples")
        return EmotionalProfile(
            distribution=EmotionDistribution(self.accumulated / self.prompt_count),
            prompt_count=self.prompt_count,
            source=self.id,
        )

    def conversation_emotion(self) -> str:
        """Argmax over all samples concatenated in turn order (ties: first inserted)."""
        merged: list[str] = []
        for _, samples in self.turns:
            merged.extend(samples.samples)
        if not merged:
            raise EmptySessionError(f"session {self.id} has no samples")
        return argmax_emotion(EmotionSampleSet(tuple(merged)))

    def export(self) -> dict:
        """JSON document for the session transcript and profile."""
        turns = []
        for turn, samples in self.turns:
            turns.append(
                {
                    "prompt": turn.prompt,
                    "emotion_samples": list(samples.samples),
                    "discarded": samples.discarded_count,
                    "predicted_emotion": argmax_emotion(samples) if len(samples) else None,
                    "response": turn.response,
                }
            )
        profile = self.profile().distribution.as_list() if self.prompt_count else None
        return {
            "id": self.id,
            "turns": turns,
            "profile": profile,
            "prompt_count": self.prompt_count,
        }

    def completed_turns(self) -> list[ConversationTurn]:
        """History usable as a query prefix (turns with emotion and response)."""
        return [turn for turn, _ in self.turns if turn.complete]


class SessionStore:
    """Sessions keyed by id, optionally persisted as JSONL event logs.

    With a root directory every mutation appends one event line to
    ``<id>.jsonl``; ``SessionStore.open`` rebuilds state by replay.
    Writers are serialized per session; reads are safe concurrently and
    see the last completed turn.
    """

    def __init__(self, root: Path | str | None = None) -> None:
        self.root = Path(root) if root is not None else None
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, ConversationSession] = {}
        self._locks: dict[str, threading.Lock] = {}

    @classmethod
    def open(cls, root: Path | str) -> "SessionStore":
        store = cls(root)
        for log in sorted(store.root.glob("*.jsonl")):
            store._replay(log)
        return store

    def create(self, session_id: str | None = None) -> ConversationSession:
        session = ConversationSession(id=session_id or uuid.uuid4().hex)
        self._sessions[session.id] = session
        self._locks[session.id] = threading.Lock()
        self._append_event(
            session.id, {"event": "created", "id": session.id, "at": session.created_at}
        )
        return session

    def get(self, session_id: str) -> ConversationSession:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"no session {session_id!r}") from None

    def lock(self, session_id: str) -> threading.Lock:
        self.get(session_id)
        return self._locks[session_id]

    def add_turn(
        self, session_id: str, turn: ConversationTurn, samples: EmotionSampleSet
    ) -> ConversationSession:
        session = self.get(session_id)
        self._append_event(
            session_id,
            {
                "event": "turn",
                "prompt": turn.prompt,
                "emotion": turn.emotion,
                "response": turn.response,
                "samples": list(samples.samples),
                "discarded": samples.discarded_count,
                "at": _now(),
            },
        )
        return session.add_turn(turn, samples)

    def _append_event(self, session_id: str, event: dict) -> None:
        if self.root is None:
            return
        path = self.root / f"{session_id}.jsonl"
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")
            fh.flush()

    def _replay(self, log: Path) -> None:
        session: ConversationSession | None = None
        with log.open(encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                event = json.loads(line)
                if event["event"] == "created":
                    session = ConversationSession(id=event["id"], created_at=event["at"])
                elif event["event"] == "turn" and session is not None:
                    turn = ConversationTurn(
                        prompt=event["prompt"],
                        emotion=event.get("emotion"),
                        response=event.get("response"),
                    )
                    samples = EmotionSampleSet(
                        tuple(event.get("samples", ())), event.get("discarded", 0)
                    )
                    session.add_turn(turn, samples)
        if session is not None:
            self._sessions[session.id] = session
            self._locks[session.id] = threading.Lock()
