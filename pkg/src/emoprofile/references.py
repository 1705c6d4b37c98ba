"""Corpus ingestion into named reference profiles, and their registry.

A reference profile is built by segmenting every post into sentences,
sampling emotions per segment, summing the raw counts over the whole
corpus, and normalizing once at the end.  This is deliberately different
from session profiles, which normalize per prompt before averaging; the
per-segment-normalized variant is available behind a flag.

Screening polarity is fixed by name for the known communities; anything
else takes the polarity the caller declares.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
import re

import numpy as np

from .backends import sample_emotions
from .emotions import (
    VOCABULARY,
    EmotionDistribution,
    distribution_from_counts,
    uniform_distribution,
)
from .errors import (
    AllSamplesDiscardedError,
    EmptyCorpusError,
    SchemaViolationError,
)
from .sessions import EmotionalProfile

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

POSITIVE_REFERENCES = frozenset(
    {"suicide", "depression", "bpd", "bipolar", "ptsd", "addiction", "schizophrenia"}
)
NEGATIVE_REFERENCES = frozenset({"normal", "uniform", "casualConversation"})
UNUSED_REFERENCES = frozenset(
    {
        "alcoholism",
        "eatingDisorder",
        "socialAnxiety",
        "autism",
        "adhd",
        "anxiety",
        "lonely",
        "healthAnxiety",
    }
)

POLARITIES = ("positive", "negative", "unused")

MIN_SEGMENT_CHARS = 3
DEFAULT_MIN_POST_CHARS = 20
DEFAULT_MAX_POST_CHARS = 10_000

_SENTENCE_BREAK = re.compile(r"(?<=[.!?])\s+")


def fixed_polarity(name: str) -> str | None:
    """Canonical polarity for the known community names, else None."""
    if name in POSITIVE_REFERENCES:
        return "positive"
    if name in NEGATIVE_REFERENCES:
        return "negative"
    if name in UNUSED_REFERENCES:
        return "unused"
    return None


@dataclass(frozen=True)
class CorpusPost:
    id: str
    text: str
    label: str | None = None

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError(f"post {self.id!r} has empty text")


@dataclass
class ReferenceProfile:
    """A named emotion distribution with screening polarity and provenance.

    ``sampled_count``/``discarded_count`` are build-time bookkeeping and
    are not part of the registry file schema.
    """

    name: str
    polarity: str
    distribution: EmotionDistribution
    post_count: int = 0
    segment_count: int = 0
    source: str = ""
    sampled_count: int = 0
    discarded_count: int = 0

    def __post_init__(self) -> None:
        if self.polarity not in POLARITIES:
            raise ValueError(f"polarity must be one of {POLARITIES}, got {self.polarity!r}")
        canonical = fixed_polarity(self.name)
        if canonical is not None and canonical != self.polarity:
            raise ValueError(
                f"reference {self.name!r} has fixed polarity {canonical!r}, got {self.polarity!r}"
            )


def segment_sentences(text: str, min_chars: int = MIN_SEGMENT_CHARS) -> list[str]:
    """Sentence-ish segments: split after . ! ? plus whitespace, and on
    newline runs; trimmed; pieces shorter than ``min_chars`` are dropped."""
    segments: list[str] = []
    for block in re.split(r"\n+", text):
        for piece in _SENTENCE_BREAK.split(block):
            piece = piece.strip()
            if len(piece) >= min_chars:
                segments.append(piece)
    return segments


def filter_posts(
    posts: list[CorpusPost],
    min_chars: int | None = DEFAULT_MIN_POST_CHARS,
    max_chars: int | None = DEFAULT_MAX_POST_CHARS,
) -> list[CorpusPost]:
    """Drop posts with anomalous lengths (uninformative or runaway)."""
    out = []
    for post in posts:
        n = len(post.text.strip())
        if min_chars is not None and n < min_chars:
            continue
        if max_chars is not None and n > max_chars:
            continue
        out.append(post)
    return out


def _segment_counts(backend, segment: str, n: int) -> tuple[Counter, int]:
    """Raw label counts plus discard count for one segment."""
    try:
        samples = sample_emotions(backend, [], segment, n=n)
    except AllSamplesDiscardedError as exc:
        return Counter(), exc.discarded
    return Counter(samples.samples), samples.discarded_count


def _aggregate_segments(
    backend, segments: list[str], samples_per_segment: int, workers: int
) -> tuple[Counter, int]:
    totals: Counter = Counter()
    discarded = 0
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda s: _segment_counts(backend, s, samples_per_segment), segments)
            )
    else:
        results = [_segment_counts(backend, s, samples_per_segment) for s in segments]
    for counts, dropped in results:
        totals.update(counts)
        discarded += dropped
    return totals, discarded


def build_reference(
    name: str,
    polarity: str,
    corpus: list[CorpusPost],
    backend,
    samples_per_segment: int = 10,
    *,
    normalize_per_segment: bool = False,
    min_post_chars: int | None = DEFAULT_MIN_POST_CHARS,
    max_post_chars: int | None = DEFAULT_MAX_POST_CHARS,
    workers: int = 1,
    source: str = "",
) -> ReferenceProfile:
    """Aggregate a corpus into a reference profile.

    Raw counts from every segment of every post are summed and normalized
    once (pass ``normalize_per_segment=True`` for the per-segment-average
    variant).  Posts outside the length window are dropped first.
    """
    posts = filter_posts(corpus, min_post_chars, max_post_chars)
    segments: list[str] = []
    for post in posts:
        segments.extend(segment_sentences(post.text))
    if not segments:
        raise EmptyCorpusError(f"no usable segments for reference {name!r}")

    if normalize_per_segment:
        acc = np.zeros(len(VOCABULARY), dtype=np.float64)
        contributing = 0
        discarded = 0
        total_valid = 0
        for segment in segments:
            counts, dropped = _segment_counts(backend, segment, samples_per_segment)
            discarded += dropped
            if counts:
                acc += distribution_from_counts(counts).weights
                contributing += 1
                total_valid += sum(counts.values())
        if contributing == 0:
            raise AllSamplesDiscardedError(discarded)
        distribution = EmotionDistribution(acc / contributing)
    else:
        totals, discarded = _aggregate_segments(backend, segments, samples_per_segment, workers)
        if not totals:
            raise AllSamplesDiscardedError(discarded)
        total_valid = sum(totals.values())
        distribution = distribution_from_counts(totals)

    expected = len(segments) * samples_per_segment
    if total_valid + discarded != expected:
        logger.warning(
            "reference %r: backend produced %d generations across %d segments, expected %d",
            name, total_valid + discarded, len(segments), expected,
        )
    return ReferenceProfile(
        name=name,
        polarity=polarity,
        distribution=distribution,
        post_count=len(posts),
        segment_count=len(segments),
        source=source,
        sampled_count=total_valid,
        discarded_count=discarded,
    )


def post_embedding(post: CorpusPost, backend, samples_per_segment: int = 10) -> EmotionalProfile:
    """Screening-time embedding of a single post (raw-count aggregation)."""
    segments = segment_sentences(post.text)
    if not segments:
        raise EmptyCorpusError(f"post {post.id!r} has no usable segments")
    totals, discarded = _aggregate_segments(backend, segments, samples_per_segment, workers=1)
    if not totals:
        raise AllSamplesDiscardedError(discarded)
    return EmotionalProfile(
        distribution=distribution_from_counts(totals),
        prompt_count=len(segments),
        source=post.id,
    )


def uniform_reference() -> ReferenceProfile:
    """The built-in uniform control reference (negative polarity)."""
    return ReferenceProfile(
        name="uniform",
        polarity="negative",
        distribution=uniform_distribution(),
        post_count=0,
        segment_count=0,
        source="builtin",
    )


class ReferenceRegistry:
    """Ordered collection of reference profiles; order breaks ties."""

    def __init__(self, references: list[ReferenceProfile] | None = None) -> None:
        self._refs: dict[str, ReferenceProfile] = {}
        for ref in references or []:
            self.add(ref)

    def add(self, ref: ReferenceProfile) -> None:
        self._refs[ref.name] = ref

    def __len__(self) -> int:
        return len(self._refs)

    def __contains__(self, name: str) -> bool:
        return name in self._refs

    def get(self, name: str) -> ReferenceProfile | None:
        return self._refs.get(name)

    def all(self) -> list[ReferenceProfile]:
        return list(self._refs.values())

    def names(self) -> list[str]:
        return list(self._refs)

    def by_polarity(self, polarity: str) -> list[ReferenceProfile]:
        return [r for r in self._refs.values() if r.polarity == polarity]

    def screening_references(self, include_unused: bool = False) -> list[ReferenceProfile]:
        """The references the nearest search runs over, in registry order."""
        if include_unused:
            return self.all()
        return [r for r in self._refs.values() if r.polarity in ("positive", "negative")]

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "vocabulary": VOCABULARY.to_json(),
            "references": [
                {
                    "name": r.name,
                    "polarity": r.polarity,
                    "distribution": r.distribution.as_list(),
                    "post_count": r.post_count,
                    "segment_count": r.segment_count,
                    "source": r.source,
                }
                for r in self._refs.values()
            ],
        }

    @classmethod
    def from_json(cls, doc: object) -> "ReferenceRegistry":
        if not isinstance(doc, dict):
            raise SchemaViolationError("registry document must be an object", "$")
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise SchemaViolationError(
                f"unsupported schema_version {doc.get('schema_version')!r}", "schema_version"
            )
        vocab = doc.get("vocabulary")
        if vocab != VOCABULARY.to_json():
            raise SchemaViolationError("vocabulary does not match the canonical 32 labels", "vocabulary")
        refs_doc = doc.get("references")
        if not isinstance(refs_doc, list):
            raise SchemaViolationError("references must be a list", "references")
        registry = cls()
        for i, entry in enumerate(refs_doc):
            path = f"references[{i}]"
            if not isinstance(entry, dict):
                raise SchemaViolationError("reference entry must be an object", path)
            try:
                name = entry["name"]
                polarity = entry["polarity"]
                weights = entry["distribution"]
            except KeyError as missing:
                raise SchemaViolationError(f"missing field {missing}", path) from None
            if not isinstance(weights, list) or len(weights) != len(VOCABULARY):
                raise SchemaViolationError(
                    f"distribution must be a list of {len(VOCABULARY)} numbers",
                    f"{path}.distribution",
                )
            try:
                distribution = EmotionDistribution(np.asarray(weights, dtype=np.float64))
            except (ValueError, TypeError) as exc:
                raise SchemaViolationError(str(exc), f"{path}.distribution") from None
            try:
                ref = ReferenceProfile(
                    name=name,
                    polarity=polarity,
                    distribution=distribution,
                    post_count=int(entry.get("post_count", 0)),
                    segment_count=int(entry.get("segment_count", 0)),
                    source=str(entry.get("source", "")),
                )
            except ValueError as exc:
                raise SchemaViolationError(str(exc), f"{path}.polarity") from None
            registry.add(ref)
        if "suicide" not in registry:
            logger.warning("registry has no 'suicide' reference; screening may be incomplete")
        return registry


def save_registry(path: Path | str, registry: ReferenceRegistry) -> None:
    Path(path).write_text(json.dumps(registry.to_json(), indent=2), encoding="utf-8")


def load_registry(path: Path | str) -> ReferenceRegistry:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolationError(f"invalid JSON: {exc}", "$") from None
    return ReferenceRegistry.from_json(doc)
