"""Emotion-classifier backends and the sampling operations built on them.

A backend turns a serialized query prefix into raw text generations.  Three
implementations are provided:

* MockLexiconBackend — deterministic keyword lexicon, pure function of
  (current prompt text, seed).  Used for offline experiments and tests.
* ScriptedBackend — replays queued generations or failures; for fixtures.
* RemoteCompletionBackend — JSON-over-HTTP client for a generative model
  served elsewhere.

``sample_emotions`` and ``generate_reply`` implement the per-prompt pipeline
on top of any backend: emotion queries draw ``samples_per_prompt``
independent generations, out-of-vocabulary generations are discarded (never
resampled), and replies pass through verbatim.
"""

from __future__ import annotations

import hashlib
import os
import random
import re
import threading
import time
from collections.abc import Sequence
from dataclasses import dataclass

import httpx

from .codec import (
    ASSISTANT_TOKEN,
    EMOTION_TOKEN,
    END_TOKEN,
    ConversationTurn,
    encode_emotion_query,
    encode_reply_query,
    parse_conversation,
    truncate_generation,
)
from .emotions import VOCABULARY, EmotionSampleSet
from .errors import AllSamplesDiscardedError, BackendUnavailableError

ENDPOINT_ENV_VAR = "EMOPROFILE_ENDPOINT"


@dataclass
class BackendConfig:
    """Generation settings shared by all backend kinds."""

    kind: str = "mock"
    endpoint: str | None = None
    top_k: int = 10
    samples_per_prompt: int = 10
    max_emotion_tokens: int = 8
    max_reply_tokens: int = 256
    temperature: float = 1.0
    timeout_ms: int = 30_000
    max_retries: int = 2
    retry_backoff_s: float = 0.1
    max_concurrency: int = 4
    supports_batch_n: bool = True
    max_history_turns: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("mock", "remote"):
            raise ValueError(f"unknown backend kind: {self.kind!r}")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.samples_per_prompt < 1:
            raise ValueError("samples_per_prompt must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


# Documented mock lexicon: keyword -> emotion label.  Keywords are matched
# case-insensitively on word boundaries; the longest matched keyword picks
# the primary label.  Every label has at least two keywords.  "bugs" is
# deliberately mapped to terrified so creepy-crawly prompts read as terror.
MOCK_LEXICON: dict[str, str] = {
    "afraid": "afraid", "scared": "afraid",
    "angry": "angry", "livid": "angry",
    "annoyed": "annoyed", "irritated": "annoyed",
    "anticipating": "anticipating", "awaiting": "anticipating",
    "anxious": "anxious", "uneasy": "anxious",
    "apprehensive": "apprehensive", "wary": "apprehensive",
    "ashamed": "ashamed", "shameful": "ashamed",
    "caring": "caring", "nurturing": "caring",
    "confident": "confident", "assured": "confident",
    "content": "content", "satisfied": "content",
    "devastated": "devastated", "crushed": "devastated",
    "disappointed": "disappointed", "letdown": "disappointed",
    "disgusted": "disgusted", "revolted": "disgusted",
    "embarrassed": "embarrassed", "mortified": "embarrassed",
    "excited": "excited", "thrilled": "excited",
    "faithful": "faithful", "loyal": "faithful",
    "furious": "furious", "enraged": "furious",
    "grateful": "grateful", "thankful": "grateful",
    "guilty": "guilty", "remorseful": "guilty",
    "hopeful": "hopeful", "optimistic": "hopeful",
    "impressed": "impressed", "dazzled": "impressed",
    "jealous": "jealous", "envious": "jealous",
    "joyful": "joyful", "jubilant": "joyful",
    "lonely": "lonely", "isolated": "lonely",
    "nostalgic": "nostalgic", "wistful": "nostalgic",
    "prepared": "prepared", "equipped": "prepared",
    "proud": "proud", "accomplished": "proud",
    "sad": "sad", "heartbroken": "sad",
    "sentimental": "sentimental", "touched": "sentimental",
    "surprised": "surprised", "astonished": "surprised",
    "terrified": "terrified", "petrified": "terrified", "bugs": "terrified",
    "trusting": "trusting", "reliant": "trusting",
}

MOCK_FALLBACK_LABEL = "content"
MOCK_PRIMARY_PROBABILITY = 0.8

_KEYWORD_RE = re.compile(
    r"\b(" + "|".join(sorted(map(re.escape, MOCK_LEXICON), key=len, reverse=True)) + r")\b",
    re.IGNORECASE,
)


class MockLexiconBackend:
    """Deterministic lexicon classifier posing as a generative backend.

    Emotion queries: the longest keyword found in the current prompt picks
    the primary label; each sample emits the primary with probability 0.8
    and otherwise one of the other matched labels, so aggregation paths get
    exercised.  With a single matched label (or none: fallback "content")
    every sample is the primary.  The RNG is keyed on (seed, prompt text),
    making the backend a pure function of its inputs.

    Reply queries: a fixed template conditioned on the chosen emotion.
    """

    def __init__(self, config: BackendConfig | None = None) -> None:
        self.config = config or BackendConfig(kind="mock")

    def complete(self, prefix: str, *, n: int = 1, max_tokens: int = 8) -> list[str]:
        if prefix.endswith(EMOTION_TOKEN):
            prompt = parse_conversation(prefix)[-1].prompt
            return self._sample_labels(prompt, n)
        if prefix.endswith(ASSISTANT_TOKEN):
            emotion = parse_conversation(prefix)[-1].emotion
            if emotion is None:
                raise ValueError("reply query lacks an emotion")
            return [f"That sounds {emotion}. Tell me more.{END_TOKEN}"] * n
        raise ValueError("prefix must end at an emotion or assistant marker")

    def _sample_labels(self, prompt: str, n: int) -> list[str]:
        primary, pool = self._match(prompt)
        rng = random.Random(_stable_seed(self.config.seed, prompt))
        out: list[str] = []
        for _ in range(n):
            if pool and rng.random() >= MOCK_PRIMARY_PROBABILITY:
                out.append(f"{rng.choice(pool)}{END_TOKEN}")
            else:
                out.append(f"{primary}{END_TOKEN}")
        return out

    @staticmethod
    def _match(text: str) -> tuple[str, list[str]]:
        """Primary label plus the other matched labels in match order."""
        matches = [(m.group(0).lower(), m.start()) for m in _KEYWORD_RE.finditer(text)]
        if not matches:
            return MOCK_FALLBACK_LABEL, []
        primary_kw = max(matches, key=lambda m: (len(m[0]), -m[1]))[0]
        primary = MOCK_LEXICON[primary_kw]
        pool: list[str] = []
        for kw, _ in matches:
            label = MOCK_LEXICON[kw]
            if label != primary and label not in pool:
                pool.append(label)
        return primary, pool


def _stable_seed(seed: int, text: str) -> int:
    digest = hashlib.sha256(f"{seed}:{text}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class ScriptedBackend:
    """Replays queued generation batches; queued exceptions are raised.

    Each ``complete`` call consumes one queue entry regardless of ``n``,
    so a fixture can line up emotion batches and replies alternately.
    """

    def __init__(
        self,
        script: Sequence[list[str] | Exception],
        config: BackendConfig | None = None,
    ) -> None:
        self.config = config or BackendConfig(kind="mock")
        self._script: list[list[str] | Exception] = list(script)

    def push(self, entry: list[str] | Exception) -> None:
        self._script.append(entry)

    def complete(self, prefix: str, *, n: int = 1, max_tokens: int = 8) -> list[str]:
        if not self._script:
            raise BackendUnavailableError("scripted backend exhausted")
        entry = self._script.pop(0)
        if isinstance(entry, Exception):
            raise entry
        return list(entry)


class RemoteCompletionBackend:
    """JSON completion client for a remote generative backend.

    Request body: ``{prompt, max_tokens, top_k, temperature,
    stop: ["<|endoftext|>"], n}``.  The response carries either
    ``{"completions": [...]}`` or OpenAI-style ``{"choices": [{"text": ...}]}``.
    The endpoint comes from config, overridable via ``EMOPROFILE_ENDPOINT``.
    In-flight requests are bounded by ``max_concurrency``.
    """

    def __init__(self, config: BackendConfig, client: httpx.Client | None = None) -> None:
        endpoint = os.environ.get(ENDPOINT_ENV_VAR) or config.endpoint
        if not endpoint:
            raise ValueError("remote backend requires an endpoint")
        self.config = config
        self.endpoint = endpoint
        self._client = client or httpx.Client(timeout=config.timeout_ms / 1000.0)
        self._slots = threading.Semaphore(config.max_concurrency)

    def complete(self, prefix: str, *, n: int = 1, max_tokens: int = 8) -> list[str]:
        if self.config.supports_batch_n or n == 1:
            return self._request(prefix, n=n, max_tokens=max_tokens)
        out: list[str] = []
        for _ in range(n):
            out.extend(self._request(prefix, n=1, max_tokens=max_tokens))
        return out

    def _request(self, prefix: str, *, n: int, max_tokens: int) -> list[str]:
        body = {
            "prompt": prefix,
            "max_tokens": max_tokens,
            "top_k": self.config.top_k,
            "temperature": self.config.temperature,
            "stop": [END_TOKEN],
            "n": n,
        }
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                time.sleep(self.config.retry_backoff_s * (2 ** (attempt - 1)))
            try:
                with self._slots:
                    response = self._client.post(self.endpoint, json=body)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = BackendUnavailableError(
                    f"backend returned {response.status_code}"
                )
                continue
            if response.status_code >= 400:
                raise BackendUnavailableError(
                    f"backend rejected request: {response.status_code} {response.text[:200]}"
                )
            return _parse_completions(response.json())
        raise BackendUnavailableError(
            f"backend unreachable after {self.config.max_retries + 1} attempts: {last_error}"
        )


def _parse_completions(payload: object) -> list[str]:
    if isinstance(payload, dict):
        if isinstance(payload.get("completions"), list):
            return [str(c) for c in payload["completions"]]
        if isinstance(payload.get("choices"), list):
            return [str(c.get("text", "")) for c in payload["choices"]]
    raise BackendUnavailableError(f"unrecognized completion payload: {payload!r:.200}")


def create_backend(config: BackendConfig):
    """Backend instance for the configured kind."""
    if config.kind == "remote":
        return RemoteCompletionBackend(config)
    return MockLexiconBackend(config)


def _bounded_history(backend, history: Sequence[ConversationTurn]) -> Sequence[ConversationTurn]:
    limit = backend.config.max_history_turns
    if limit is not None and len(history) > limit:
        return history[-limit:]
    return history


def sample_emotions(
    backend, history: Sequence[ConversationTurn], prompt: str, n: int | None = None
) -> EmotionSampleSet:
    """Draw ``n`` (default: samples_per_prompt) emotion generations.

    Each generation is truncated at the first END token and trimmed;
    in-vocabulary labels are retained in sampling order, everything else
    increments the discard count and is not resampled.  Raises
    AllSamplesDiscardedError when no valid sample remains.
    """
    cfg = backend.config
    prefix = encode_emotion_query(_bounded_history(backend, history), prompt)
    generations = backend.complete(
        prefix, n=n or cfg.samples_per_prompt, max_tokens=cfg.max_emotion_tokens
    )
    retained: list[str] = []
    discarded = 0
    for generation in generations:
        label = truncate_generation(generation).strip()
        if label in VOCABULARY:
            retained.append(label)
        else:
            discarded += 1
    if not retained:
        raise AllSamplesDiscardedError(discarded)
    return EmotionSampleSet(tuple(retained), discarded)


def generate_reply(
    backend, history: Sequence[ConversationTurn], prompt: str, emotion: str
) -> str:
    """One reply generation conditioned on the chosen emotion, verbatim."""
    prefix = encode_reply_query(_bounded_history(backend, history), prompt, emotion)
    generations = backend.complete(prefix, n=1, max_tokens=backend.config.max_reply_tokens)
    if not generations:
        return ""
    return truncate_generation(generations[0])
