"""Token-format encoding, parsing, and round-trip identity."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from emoprofile.codec import (
    SPECIAL_TOKENS,
    ConversationTurn,
    encode_emotion_query,
    encode_reply_query,
    parse_conversation,
    truncate_generation,
)
from emoprofile.emotions import EMOTION_LABELS
from emoprofile.errors import (
    IncompleteHistoryTurnError,
    MalformedFormatError,
    ReservedTokenError,
    UnknownLabelError,
)

safe_text = st.text(
    alphabet=st.characters(blacklist_characters="<|>", blacklist_categories=("Cs",)),
    min_size=1,
    max_size=60,
).filter(lambda s: s.strip())


def completed_turns():
    return st.lists(
        st.builds(
            ConversationTurn,
            prompt=safe_text,
            emotion=st.sampled_from(EMOTION_LABELS),
            response=safe_text,
        ),
        max_size=4,
    )


class TestEncodeEmotionQuery:
    def test_first_prompt_layout(self):
        out = encode_emotion_query([], "I couldn't wait to go to the concert.")
        assert out == "<|prompter|>I couldn't wait to go to the concert.<|endoftext|><|emotion|>"

    def test_one_turn_history_layout(self):
        history = [
            ConversationTurn(
                prompt="I couldn't wait to go to the concert.",
                emotion="anticipating",
                response="What concert was it?",
            )
        ]
        out = encode_emotion_query(history, "The U2 concert.")
        assert out == (
            "<|prompter|>I couldn't wait to go to the concert.<|endoftext|>"
            "<|emotion|>anticipating<|endoftext|>"
            "<|assistant|>What concert was it?<|endoftext|>"
            "<|prompter|>The U2 concert.<|endoftext|><|emotion|>"
        )

    def test_incomplete_history_rejected(self):
        with pytest.raises(IncompleteHistoryTurnError):
            encode_emotion_query([ConversationTurn(prompt="hello there")], "next")

    def test_empty_prompt_rejected(self):
        with pytest.raises(ValueError):
            encode_emotion_query([], "   ")

    def test_reserved_token_in_text_rejected(self):
        with pytest.raises(ReservedTokenError):
            encode_emotion_query([], "sneaky <|endoftext|> inside")


class TestEncodeReplyQuery:
    def test_layout(self):
        out = encode_reply_query([], "P", "afraid")
        assert out == "<|prompter|>P<|endoftext|><|emotion|>afraid<|endoftext|><|assistant|>"

    def test_extends_emotion_query(self):
        emotion_q = encode_emotion_query([], "P")
        reply_q = encode_reply_query([], "P", "afraid")
        assert reply_q.startswith(emotion_q)

    def test_unknown_emotion_rejected(self):
        with pytest.raises(UnknownLabelError):
            encode_reply_query([], "P", "bored")


class TestParseConversation:
    def test_empty_string(self):
        assert parse_conversation("") == []

    def test_completed_reply_round_trip(self):
        serialized = encode_reply_query([], "P", "afraid") + "hello<|endoftext|>"
        turns = parse_conversation(serialized)
        assert len(turns) == 1
        assert turns[0] == ConversationTurn(prompt="P", emotion="afraid", response="hello")

    def test_response_before_prompt_is_malformed_at_zero(self):
        with pytest.raises(MalformedFormatError) as exc:
            parse_conversation("<|assistant|>x")
        assert exc.value.offset == 0

    def test_emotion_query_parses_to_partial_turn(self):
        turns = parse_conversation(encode_emotion_query([], "P"))
        assert turns == [ConversationTurn(prompt="P")]

    def test_reply_query_parses_to_pending_response(self):
        turns = parse_conversation(encode_reply_query([], "P", "sad"))
        assert turns == [ConversationTurn(prompt="P", emotion="sad")]

    def test_unterminated_text_is_malformed(self):
        with pytest.raises(MalformedFormatError):
            parse_conversation("<|prompter|>never ends")

    def test_empty_prompt_is_malformed(self):
        with pytest.raises(MalformedFormatError):
            parse_conversation("<|prompter|> <|endoftext|><|emotion|>")

    def test_nested_special_token_rejected_with_offset(self):
        bad = "<|prompter|>a<|prompter|>b<|endoftext|><|emotion|>"
        with pytest.raises(MalformedFormatError) as exc:
            parse_conversation(bad)
        assert exc.value.offset == len("<|prompter|>a".encode("utf-8"))

    def test_byte_offset_counts_utf8_bytes(self):
        bad = "<|prompter|>héllo<|assistant|>x"
        with pytest.raises(MalformedFormatError) as exc:
            parse_conversation(bad)
        assert exc.value.offset == len("<|prompter|>héllo".encode("utf-8"))


class TestRoundTrip:
    @given(completed_turns(), safe_text)
    def test_emotion_query_round_trip(self, history, prompt):
        serialized = encode_emotion_query(history, prompt)
        parsed = parse_conversation(serialized)
        assert parsed[:-1] == history
        assert parsed[-1] == ConversationTurn(prompt=prompt)

    @given(completed_turns(), safe_text, st.sampled_from(EMOTION_LABELS), safe_text)
    def test_full_turn_round_trip(self, history, prompt, emotion, response):
        serialized = (
            encode_reply_query(history, prompt, emotion) + response + "<|endoftext|>"
        )
        parsed = parse_conversation(serialized)
        assert parsed == history + [
            ConversationTurn(prompt=prompt, emotion=emotion, response=response)
        ]

    @given(completed_turns())
    def test_reencoding_parsed_history_is_identity(self, history):
        if not history:
            return
        serialized = encode_emotion_query(history[:-1], history[-1].prompt)
        reparsed = parse_conversation(serialized)
        again = encode_emotion_query(reparsed[:-1], reparsed[-1].prompt)
        assert again == serialized


class TestTruncateGeneration:
    def test_cuts_at_first_end_token(self):
        assert truncate_generation("joyful<|endoftext|>garbage") == "joyful"

    def test_no_end_token_passes_through(self):
        assert truncate_generation("joyful") == "joyful"

    def test_empty(self):
        assert truncate_generation("") == ""


def test_special_tokens_are_the_documented_four():
    assert SPECIAL_TOKENS == (
        "<|prompter|>",
        "<|emotion|>",
        "<|assistant|>",
        "<|endoftext|>",
    )
