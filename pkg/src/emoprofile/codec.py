"""Bit-exact three-block conversation token format.

One completed exchange serializes as

    <|prompter|>{prompt}<|endoftext|><|emotion|>{emotion}<|endoftext|><|assistant|>{response}<|endoftext|>

and a classification query ends after the trailing ``<|emotion|>`` marker so
generation continues from there.  The codec is bijective: user text may not
contain any special-token literal (rejected at ingestion, never escaped),
and parsing rejects anything outside the layout with the byte offset of the
first violation.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .emotions import VOCABULARY
from .errors import (
    IncompleteHistoryTurnError,
    MalformedFormatError,
    ReservedTokenError,
)

PROMPTER_TOKEN = "<|prompter|>"
EMOTION_TOKEN = "<|emotion|>"
ASSISTANT_TOKEN = "<|assistant|>"
END_TOKEN = "<|endoftext|>"

SPECIAL_TOKENS = (PROMPTER_TOKEN, EMOTION_TOKEN, ASSISTANT_TOKEN, END_TOKEN)


@dataclass
class ConversationTurn:
    """One prompt with its (possibly pending) emotion and response.

    Parsing may carry arbitrary emotion strings (training data is
    validated downstream); the prompt must be non-empty after trimming.
    """

    prompt: str
    emotion: str | None = None
    response: str | None = None

    def __post_init__(self) -> None:
        if not self.prompt.strip():
            raise ValueError("prompt must be non-empty")

    @property
    def complete(self) -> bool:
        return self.emotion is not None and self.response is not None


def _check_text(text: str, what: str) -> str:
    for token in SPECIAL_TOKENS:
        if token in text:
            raise ReservedTokenError(f"{what} contains reserved token {token!r}")
    return text


def encode_emotion_query(history: Sequence[ConversationTurn], prompt: str) -> str:
    """Serialize history plus the new prompt, ending at ``<|emotion|>``.

    Every history turn must be complete (emotion and response set).
    """
    if not prompt.strip():
        raise ValueError("prompt must be non-empty")
    parts: list[str] = []
    for i, turn in enumerate(history):
        if not turn.complete:
            raise IncompleteHistoryTurnError(f"history turn {i} lacks emotion or response")
        parts.append(
            f"{PROMPTER_TOKEN}{_check_text(turn.prompt, 'prompt')}{END_TOKEN}"
            f"{EMOTION_TOKEN}{_check_text(turn.emotion, 'emotion')}{END_TOKEN}"
            f"{ASSISTANT_TOKEN}{_check_text(turn.response, 'response')}{END_TOKEN}"
        )
    parts.append(f"{PROMPTER_TOKEN}{_check_text(prompt, 'prompt')}{END_TOKEN}{EMOTION_TOKEN}")
    return "".join(parts)


def encode_reply_query(history: Sequence[ConversationTurn], prompt: str, emotion: str) -> str:
    """Emotion query extended with the chosen emotion, ending at ``<|assistant|>``."""
    VOCABULARY.lookup(emotion)
    return f"{encode_emotion_query(history, prompt)}{emotion}{END_TOKEN}{ASSISTANT_TOKEN}"


def _byte_offset(serialized: str, pos: int) -> int:
    return len(serialized[:pos].encode("utf-8"))


def _next_token(serialized: str, pos: int) -> tuple[str | None, int]:
    """Earliest special token at or after ``pos`` and its position."""
    best: tuple[str | None, int] = (None, len(serialized))
    for token in SPECIAL_TOKENS:
        at = serialized.find(token, pos)
        if at != -1 and at < best[1]:
            best = (token, at)
    return best


def _read_segment(serialized: str, pos: int, what: str) -> tuple[str, int]:
    """Text from ``pos`` up to the next END token; any other token is a violation."""
    token, at = _next_token(serialized, pos)
    if token is None:
        raise MalformedFormatError(
            f"unterminated {what} segment", _byte_offset(serialized, len(serialized))
        )
    if token != END_TOKEN:
        raise MalformedFormatError(
            f"expected {END_TOKEN} terminating {what}, found {token}",
            _byte_offset(serialized, at),
        )
    return serialized[pos:at], at + len(END_TOKEN)


def _expect(serialized: str, pos: int, token: str) -> int:
    if not serialized.startswith(token, pos):
        raise MalformedFormatError(
            f"expected {token} at this position", _byte_offset(serialized, pos)
        )
    return pos + len(token)


def parse_conversation(serialized: str) -> list[ConversationTurn]:
    """Inverse of the encoders; the final turn may be partial.

    Accepted partial tails: prompt only (with or without the trailing
    ``<|emotion|>`` marker) and prompt+emotion (with or without the
    trailing ``<|assistant|>`` marker).
    """
    turns: list[ConversationTurn] = []
    pos = 0
    n = len(serialized)
    while pos < n:
        pos = _expect(serialized, pos, PROMPTER_TOKEN)
        prompt_start = pos
        prompt, pos = _read_segment(serialized, pos, "prompt")
        if not prompt.strip():
            raise MalformedFormatError("empty prompt", _byte_offset(serialized, prompt_start))
        if pos >= n:
            turns.append(ConversationTurn(prompt=prompt))
            break
        pos = _expect(serialized, pos, EMOTION_TOKEN)
        if pos >= n:
            turns.append(ConversationTurn(prompt=prompt))
            break
        emotion, pos = _read_segment(serialized, pos, "emotion")
        if pos >= n:
            turns.append(ConversationTurn(prompt=prompt, emotion=emotion))
            break
        pos = _expect(serialized, pos, ASSISTANT_TOKEN)
        if pos >= n:
            turns.append(ConversationTurn(prompt=prompt, emotion=emotion))
            break
        response, pos = _read_segment(serialized, pos, "response")
        turns.append(ConversationTurn(prompt=prompt, emotion=emotion, response=response))
    return turns


def truncate_generation(generated: str) -> str:
    """Generated text up to (excluding) the first END token."""
    at = generated.find(END_TOKEN)
    return generated if at == -1 else generated[:at]
