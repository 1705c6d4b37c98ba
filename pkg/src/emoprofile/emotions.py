"""Emotion vocabulary and simplex-vector algebra.

The 32-label vocabulary is fixed and kept in alphabetical order; every
distribution in the package is a vector of 32 non-negative weights over
that order, summing to 1.  Construction tolerates a 1e-9 deviation from
unit mass and renormalizes, so downstream algebra stays clean to 1e-12.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllZeroCountsError,
    AllZeroWeightsError,
    EmptyInputError,
    EmptySampleSetError,
    UnknownLabelError,
)

EMOTION_LABELS: tuple[str, ...] = (
    "afraid",
    "angry",
    "annoyed",
    "anticipating",
    "anxious",
    "apprehensive",
    "ashamed",
    "caring",
    "confident",
    "content",
    "devastated",
    "disappointed",
    "disgusted",
    "embarrassed",
    "excited",
    "faithful",
    "furious",
    "grateful",
    "guilty",
    "hopeful",
    "impressed",
    "jealous",
    "joyful",
    "lonely",
    "nostalgic",
    "prepared",
    "proud",
    "sad",
    "sentimental",
    "surprised",
    "terrified",
    "trusting",
)

VOCABULARY_SIZE = len(EMOTION_LABELS)

# Normalization tolerances: construction accepts this much drift from unit
# mass, internal algebra is held to the tighter bound.
CONSTRUCTION_TOL = 1e-9
ALGEBRA_TOL = 1e-12


class EmotionVocabulary:
    """The fixed, ordered 32-label emotion vocabulary."""

    def __init__(self, labels: Iterable[str] = EMOTION_LABELS) -> None:
        self.labels: tuple[str, ...] = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("vocabulary labels must be distinct")
        self.index: dict[str, int] = {label: i for i, label in enumerate(self.labels)}

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self.index

    def lookup(self, label: str) -> int:
        """Position of ``label``; raises UnknownLabelError for anything else."""
        try:
            return self.index[label]
        except KeyError:
            raise UnknownLabelError(f"unknown emotion label: {label!r}") from None

    def to_json(self) -> list[str]:
        return list(self.labels)


#: Canonical vocabulary shared by the whole package.
VOCABULARY = EmotionVocabulary()


@dataclass(frozen=True)
class EmotionDistribution:
    """A probability vector over the 32 emotions (a point on the simplex)."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (VOCABULARY_SIZE,):
            raise ValueError(f"expected {VOCABULARY_SIZE} weights, got shape {w.shape}")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        total = float(w.sum())
        if abs(total - 1.0) > CONSTRUCTION_TOL:
            raise ValueError(f"weights must sum to 1 within {CONSTRUCTION_TOL}, got {total!r}")
        w = w / total
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def weight(self, label: str) -> float:
        return float(self.weights[VOCABULARY.lookup(label)])

    def as_list(self) -> list[float]:
        """JSON form: 32 numbers in canonical vocabulary order."""
        return [float(x) for x in self.weights]

    def as_mapping(self) -> dict[str, float]:
        """Label -> weight in canonical order (insertion order is canonical)."""
        return {label: float(w) for label, w in zip(VOCABULARY.labels, self.weights)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmotionDistribution):
            return NotImplemented
        return bool(np.array_equal(self.weights, other.weights))

    def __hash__(self) -> int:
        return hash(self.weights.tobytes())


@dataclass(frozen=True)
class EmotionSampleSet:
    """Ordered emotion labels sampled for one prompt.

    Insertion order is the sampling order and drives tie-breaking.
    ``discarded_count`` records out-of-vocabulary generations that were
    dropped (never resampled).
    """

    samples: tuple[str, ...] = ()
    discarded_count: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))
        for label in self.samples:
            if label not in VOCABULARY:
                raise UnknownLabelError(f"sample outside vocabulary: {label!r}")
        if self.discarded_count < 0:
            raise ValueError("discarded_count must be non-negative")

    def __len__(self) -> int:
        return len(self.samples)

    def counts(self) -> dict[str, int]:
        """Label -> count, keyed in first-occurrence (insertion) order."""
        out: dict[str, int] = {}
        for label in self.samples:
            out[label] = out.get(label, 0) + 1
        return out


def distribution_from_counts(counts: Mapping[str, int | float]) -> EmotionDistribution:
    """Normalize a label->count map into a distribution.

    Raises UnknownLabelError for out-of-vocabulary keys and
    AllZeroCountsError when the total is zero.
    """
    total = 0.0
    weights = np.zeros(VOCABULARY_SIZE, dtype=np.float64)
    for label, count in counts.items():
        idx = VOCABULARY.lookup(label)
        if count < 0:
            raise ValueError(f"negative count for {label!r}")
        weights[idx] += count
        total += count
    if total == 0:
        raise AllZeroCountsError("counts sum to zero")
    return EmotionDistribution(weights / total)


def uniform_distribution() -> EmotionDistribution:
    """The uniform distribution: every weight exactly 1/32."""
    return EmotionDistribution(np.full(VOCABULARY_SIZE, 1.0 / VOCABULARY_SIZE))


def delta_distribution(label: str) -> EmotionDistribution:
    """All mass on a single emotion."""
    weights = np.zeros(VOCABULARY_SIZE, dtype=np.float64)
    weights[VOCABULARY.lookup(label)] = 1.0
    return EmotionDistribution(weights)


def mix(parts: Iterable[tuple[EmotionDistribution, float]]) -> EmotionDistribution:
    """Convex combination of distributions with non-negative weights.

    Weights are normalized, so uniformly rescaling them leaves the
    result unchanged.
    """
    parts = list(parts)
    if not parts:
        raise EmptyInputError("mix needs at least one part")
    total_weight = 0.0
    acc = np.zeros(VOCABULARY_SIZE, dtype=np.float64)
    for dist, weight in parts:
        if weight < 0:
            raise ValueError("mix weights must be non-negative")
        acc += weight * dist.weights
        total_weight += weight
    if total_weight == 0:
        raise AllZeroWeightsError("mix weights are all zero")
    return EmotionDistribution(acc / total_weight)


def argmax_emotion(
    source: EmotionSampleSet | Mapping[str, int | float] | EmotionDistribution,
) -> str:
    """Label with the highest count or weight.

    Ties are broken by earliest first occurrence in the source's
    insertion order (canonical order for distributions), so identical
    ordered inputs always yield the same label.
    """
    if isinstance(source, EmotionSampleSet):
        items = source.counts().items()
    elif isinstance(source, EmotionDistribution):
        items = source.as_mapping().items()
    else:
        for label in source:
            VOCABULARY.lookup(label)
        items = source.items()

    best_label: str | None = None
    best_value = float("-inf")
    for label, value in items:
        if value > best_value:
            best_label = label
            best_value = value
    if best_label is None or best_value <= 0:
        raise EmptySampleSetError("no samples to aggregate")
    return best_label
