"""Shared fixtures: worked-example scripts and synthetic corpora."""

from __future__ import annotations

import pytest

from emoprofile.backends import BackendConfig, MockLexiconBackend, ScriptedBackend
from emoprofile.references import CorpusPost

# The two-exchange concert conversation used as the worked fixture:
# turn one samples lean anticipating (7 vs 3), turn two flips the
# cumulative count to excited (11 vs 8).
CONCERT_PROMPT_1 = "I couldn't wait to go to the concert."
CONCERT_PROMPT_2 = (
    "The U2 concert. Tickets were really expensive and I never thought "
    "we would be able to go, but somehow we did!!!"
)
CONCERT_REPLY_1 = "What concert was it?"
CONCERT_REPLY_2 = "Wow, that's awesome! I've always wanted to go to a U2 concert!"
CONCERT_SAMPLES_1 = ["excited"] * 3 + ["anticipating"] * 7
CONCERT_SAMPLES_2 = ["excited"] * 8 + ["joyful"] + ["anticipating"]


def concert_script() -> list[list[str]]:
    """Backend script for the fixture: emotion batch, reply, emotion batch, reply."""
    end = "<|endoftext|>"
    return [
        [s + end for s in CONCERT_SAMPLES_1],
        [CONCERT_REPLY_1 + end],
        [s + end for s in CONCERT_SAMPLES_2],
        [CONCERT_REPLY_2 + end],
    ]


@pytest.fixture
def scripted_concert_backend() -> ScriptedBackend:
    return ScriptedBackend(concert_script())


@pytest.fixture
def mock_backend() -> MockLexiconBackend:
    return MockLexiconBackend(BackendConfig(kind="mock", seed=7))


def gloom_corpus(count: int, start: int = 0) -> list[CorpusPost]:
    """Posts whose only lexicon keyword is 'heartbroken' (label: sad)."""
    return [
        CorpusPost(
            id=f"gloom-{i}",
            text=f"Entry {i}: utterly heartbroken this morning. Still heartbroken at night.",
        )
        for i in range(start, start + count)
    ]


def sunny_corpus(count: int, start: int = 0) -> list[CorpusPost]:
    """Posts whose only lexicon keyword is 'jubilant' (label: joyful)."""
    return [
        CorpusPost(
            id=f"sunny-{i}",
            text=f"Entry {i}: completely jubilant this morning. Still jubilant at night.",
        )
        for i in range(start, start + count)
    ]
