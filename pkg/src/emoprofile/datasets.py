"""File readers: post corpora (JSONL/CSV) and dialogue evaluation sets.

Corpus files hold one post per line (JSONL) or (id, text, label) columns
(CSV).  Dialogue sets follow the empathetic-conversation layout: rows of
(conversation_id, utterance_idx, speaker_role, text, context_emotion),
grouped into conversations with one gold emotion each; only speaker
utterances are classified.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import MalformedDatasetError
from .references import CorpusPost


@dataclass(frozen=True)
class DialogueConversation:
    """One evaluation conversation: gold emotion plus ordered utterances."""

    id: str
    gold_emotion: str
    utterances: tuple[tuple[str, str], ...]  # (speaker_role, text)

    def speaker_prompts(self) -> list[str]:
        return [text for role, text in self.utterances if role == "speaker"]


def read_corpus(path: Path | str) -> list[CorpusPost]:
    """Posts from a .jsonl or .csv file, dispatched on suffix."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return read_corpus_csv(path)
    return read_corpus_jsonl(path)


def read_corpus_jsonl(path: Path | str) -> list[CorpusPost]:
    posts: list[CorpusPost] = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedDatasetError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            if not isinstance(record, dict) or "text" not in record:
                raise MalformedDatasetError(f"{path}:{lineno}: expected an object with 'text'")
            posts.append(
                CorpusPost(
                    id=str(record.get("id", lineno)),
                    text=str(record["text"]),
                    label=record.get("label"),
                )
            )
    return posts


def read_corpus_csv(path: Path | str) -> list[CorpusPost]:
    posts: list[CorpusPost] = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "text" not in reader.fieldnames:
            raise MalformedDatasetError(f"{path}: CSV needs a 'text' column")
        for i, row in enumerate(reader, start=1):
            text = row.get("text") or ""
            if not text.strip():
                continue
            posts.append(
                CorpusPost(id=str(row.get("id") or i), text=text, label=row.get("label"))
            )
    return posts


_DIALOGUE_FIELDS = ("conversation_id", "utterance_idx", "speaker_role", "text", "context_emotion")


def read_dialogues(path: Path | str) -> list[DialogueConversation]:
    """Dialogue rows (CSV or JSONL) grouped into conversations."""
    path = Path(path)
    rows = _dialogue_rows_csv(path) if path.suffix.lower() == ".csv" else _dialogue_rows_jsonl(path)

    grouped: dict[str, list[tuple[int, str, str, str]]] = {}
    for row in rows:
        grouped.setdefault(row[0], []).append(row[1:])

    conversations = []
    for conv_id, items in grouped.items():
        items.sort(key=lambda r: r[0])
        emotions = {r[3] for r in items}
        if len(emotions) != 1:
            raise MalformedDatasetError(
                f"conversation {conv_id!r} carries {len(emotions)} context emotions, expected 1"
            )
        conversations.append(
            DialogueConversation(
                id=conv_id,
                gold_emotion=next(iter(emotions)),
                utterances=tuple((r[1], r[2]) for r in items),
            )
        )
    return conversations


def _dialogue_rows_csv(path: Path):
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [f for f in _DIALOGUE_FIELDS if f not in (reader.fieldnames or [])]
        if missing:
            raise MalformedDatasetError(f"{path}: missing columns {missing}")
        for lineno, row in enumerate(reader, start=2):
            yield _dialogue_row(row, f"{path}:{lineno}")


def _dialogue_rows_jsonl(path: Path):
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedDatasetError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            yield _dialogue_row(record, f"{path}:{lineno}")


def _dialogue_row(record: dict, where: str) -> tuple[str, int, str, str, str]:
    try:
        conv_id = str(record["conversation_id"])
        idx = int(record["utterance_idx"])
        role = str(record["speaker_role"])
        text = str(record["text"])
        emotion = str(record["context_emotion"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDatasetError(f"{where}: bad dialogue row: {exc!r}") from None
    if role not in ("speaker", "listener"):
        raise MalformedDatasetError(f"{where}: speaker_role must be speaker|listener, got {role!r}")
    return conv_id, idx, role, text, emotion
