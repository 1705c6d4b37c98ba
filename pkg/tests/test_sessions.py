"""Session accumulation, profiles, conversation-level prediction, persistence."""

from __future__ import annotations

import random

import numpy as np
import pytest

from emoprofile.codec import ConversationTurn
from emoprofile.emotions import EMOTION_LABELS, EmotionSampleSet
from emoprofile.errors import EmptySessionError, UnknownSessionError
from emoprofile.sessions import ConversationSession, SessionStore

from conftest import (
    CONCERT_PROMPT_1,
    CONCERT_PROMPT_2,
    CONCERT_REPLY_1,
    CONCERT_REPLY_2,
    CONCERT_SAMPLES_1,
    CONCERT_SAMPLES_2,
)


def batch_profile_oracle(sample_lists: list[list[str]]) -> np.ndarray:
    """Independent recomputation: mean of per-turn count-normalized vectors."""
    index = {label: i for i, label in enumerate(EMOTION_LABELS)}
    acc = np.zeros(32)
    used = 0
    for samples in sample_lists:
        if not samples:
            continue
        vec = np.zeros(32)
        for s in samples:
            vec[index[s]] += 1
        acc += vec / vec.sum()
        used += 1
    return acc / used


def _concert_session() -> ConversationSession:
    session = ConversationSession(id="concert")
    session.add_turn(
        ConversationTurn(CONCERT_PROMPT_1, "anticipating", CONCERT_REPLY_1),
        EmotionSampleSet(tuple(CONCERT_SAMPLES_1)),
    )
    session.add_turn(
        ConversationTurn(CONCERT_PROMPT_2, "excited", CONCERT_REPLY_2),
        EmotionSampleSet(tuple(CONCERT_SAMPLES_2)),
    )
    return session


class TestAddTurnAndProfile:
    def test_first_turn_profile_is_normalized_counts(self):
        session = ConversationSession(id="s")
        session.add_turn(
            ConversationTurn("prompt", "anticipating", "reply"),
            EmotionSampleSet(tuple(CONCERT_SAMPLES_1)),
        )
        profile = session.profile()
        assert profile.distribution.weight("excited") == pytest.approx(0.3, abs=1e-12)
        assert profile.distribution.weight("anticipating") == pytest.approx(0.7, abs=1e-12)
        assert profile.prompt_count == 1

    def test_two_turn_worked_profile(self):
        profile = _concert_session().profile()
        assert profile.distribution.weight("excited") == pytest.approx(0.55, abs=1e-12)
        assert profile.distribution.weight("anticipating") == pytest.approx(0.40, abs=1e-12)
        assert profile.distribution.weight("joyful") == pytest.approx(0.05, abs=1e-12)
        assert profile.prompt_count == 2

    def test_profile_matches_batch_oracle(self):
        session = _concert_session()
        oracle = batch_profile_oracle([CONCERT_SAMPLES_1, CONCERT_SAMPLES_2])
        assert np.allclose(session.profile().distribution.weights, oracle, atol=1e-12)

    def test_repeated_single_label_converges_monotonically(self):
        session = ConversationSession(id="s")
        last = 0.0
        for i in range(6):
            session.add_turn(
                ConversationTurn(f"p{i}", "sad", "r"),
                EmotionSampleSet(tuple(["sad"] if i else ["sad", "joyful"])),
            )
            weight = session.profile().distribution.weight("sad")
            assert weight >= last
            last = weight

    def test_empty_sample_turns_recorded_but_not_accumulated(self):
        session = ConversationSession(id="s")
        session.add_turn(ConversationTurn("all discarded"), EmotionSampleSet((), 10))
        assert session.prompt_count == 0
        assert len(session.turns) == 1
        with pytest.raises(EmptySessionError):
            session.profile()

    def test_equal_weight_per_turn_regardless_of_sample_count(self):
        one = ConversationSession(id="one")
        one.add_turn(ConversationTurn("a"), EmotionSampleSet(("sad",)))
        one.add_turn(ConversationTurn("b"), EmotionSampleSet(tuple(["joyful"] * 10)))
        # One valid sample influences the profile exactly as much as ten.
        assert one.profile().distribution.weight("sad") == pytest.approx(0.5, abs=1e-12)
        assert one.profile().distribution.weight("joyful") == pytest.approx(0.5, abs=1e-12)

    def test_empty_session_profile_raises(self):
        with pytest.raises(EmptySessionError):
            ConversationSession(id="s").profile()


class TestConversationEmotion:
    def test_worked_cumulative_counts(self):
        session = _concert_session()
        merged: list[str] = []
        for _, samples in session.turns:
            merged.extend(samples.samples)
        counts = EmotionSampleSet(tuple(merged)).counts()
        assert counts == {"excited": 11, "anticipating": 8, "joyful": 1}
        assert session.conversation_emotion() == "excited"

    def test_tie_break_across_turns(self):
        session = ConversationSession(id="s")
        session.add_turn(
            ConversationTurn("a"),
            EmotionSampleSet(
                (
                    "disappointed",
                    "content",
                    "anticipating",
                    "jealous",
                    "disgusted",
                    "disappointed",
                )
            ),
        )
        session.add_turn(
            ConversationTurn("b"),
            EmotionSampleSet(("content", "anticipating", "disgusted", "hopeful")),
        )
        assert session.conversation_emotion() == "disappointed"

    def test_single_turn_agrees_with_per_turn_argmax(self):
        session = ConversationSession(id="s")
        session.add_turn(ConversationTurn("a"), EmotionSampleSet(tuple(CONCERT_SAMPLES_1)))
        assert session.conversation_emotion() == "anticipating"

    def test_empty_raises(self):
        with pytest.raises(EmptySessionError):
            ConversationSession(id="s").conversation_emotion()


class TestIncrementalEqualsBatch:
    def test_fuzzed_sessions_up_to_100_turns(self):
        rng = random.Random(42)
        for _ in range(25):
            n_turns = rng.randint(1, 100)
            sample_lists = [
                [rng.choice(EMOTION_LABELS) for _ in range(rng.randint(1, 10))]
                for _ in range(n_turns)
            ]
            session = ConversationSession(id="fuzz")
            for i, samples in enumerate(sample_lists):
                session.add_turn(ConversationTurn(f"p{i}"), EmotionSampleSet(tuple(samples)))
            oracle = batch_profile_oracle(sample_lists)
            assert np.all(np.abs(session.profile().distribution.weights - oracle) <= 1e-12)
            assert np.all(session.accumulated >= 0)
            assert abs(float(session.accumulated.sum()) - session.prompt_count) <= 1e-9

    def test_turn_permutation_invariance(self):
        rng = random.Random(7)
        sample_lists = [
            [rng.choice(EMOTION_LABELS) for _ in range(rng.randint(1, 10))] for _ in range(20)
        ]
        forward = ConversationSession(id="f")
        for i, samples in enumerate(sample_lists):
            forward.add_turn(ConversationTurn(f"p{i}"), EmotionSampleSet(tuple(samples)))
        shuffled = list(sample_lists)
        rng.shuffle(shuffled)
        backward = ConversationSession(id="b")
        for i, samples in enumerate(shuffled):
            backward.add_turn(ConversationTurn(f"p{i}"), EmotionSampleSet(tuple(samples)))
        assert np.allclose(
            forward.profile().distribution.weights,
            backward.profile().distribution.weights,
            atol=1e-12,
        )


class TestExport:
    def test_export_document_shape(self):
        doc = _concert_session().export()
        assert doc["id"] == "concert"
        assert doc["prompt_count"] == 2
        assert len(doc["profile"]) == 32
        assert doc["turns"][0]["prompt"] == CONCERT_PROMPT_1
        assert doc["turns"][0]["emotion_samples"] == CONCERT_SAMPLES_1
        assert doc["turns"][0]["discarded"] == 0
        assert doc["turns"][0]["predicted_emotion"] == "anticipating"
        assert doc["turns"][0]["response"] == CONCERT_REPLY_1

    def test_empty_session_exports_null_profile(self):
        doc = ConversationSession(id="s").export()
        assert doc["profile"] is None
        assert doc["turns"] == []


class TestSessionStore:
    def test_unknown_session(self):
        store = SessionStore()
        with pytest.raises(UnknownSessionError):
            store.get("nope")
        with pytest.raises(UnknownSessionError):
            store.add_turn("nope", ConversationTurn("p"), EmotionSampleSet(("sad",)))

    def test_create_and_add(self):
        store = SessionStore()
        session = store.create()
        store.add_turn(session.id, ConversationTurn("p"), EmotionSampleSet(("sad",)))
        assert store.get(session.id).prompt_count == 1

    def test_replay_recovers_state(self, tmp_path):
        store = SessionStore(tmp_path)
        session = store.create()
        store.add_turn(
            session.id,
            ConversationTurn(CONCERT_PROMPT_1, "anticipating", CONCERT_REPLY_1),
            EmotionSampleSet(tuple(CONCERT_SAMPLES_1)),
        )
        store.add_turn(
            session.id,
            ConversationTurn(CONCERT_PROMPT_2, "excited", CONCERT_REPLY_2),
            EmotionSampleSet(tuple(CONCERT_SAMPLES_2)),
        )
        recovered = SessionStore.open(tmp_path).get(session.id)
        assert recovered.export() == store.get(session.id).export()

    def test_replay_keeps_discard_counts(self, tmp_path):
        store = SessionStore(tmp_path)
        session = store.create()
        store.add_turn(session.id, ConversationTurn("p"), EmotionSampleSet(("sad",), 4))
        recovered = SessionStore.open(tmp_path).get(session.id)
        assert recovered.turns[0][1].discarded_count == 4
