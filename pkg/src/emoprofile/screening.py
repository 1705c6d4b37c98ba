"""Nearest-reference risk screening and the evaluation harnesses.

Screening compares a sample profile against every declared reference with
all three metrics.  KL and JS pick the minimum divergence (infinite rows
never win), cosine picks the maximum similarity; each metric's label is
the polarity of its nearest reference and the combined label is positive
as soon as any metric says positive.  Exact ties prefer a positive
reference (recall matters more than precision here), then registry order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .backends import sample_emotions
from .emotions import VOCABULARY, EmotionSampleSet, argmax_emotion
from .errors import (
    AllSamplesDiscardedError,
    BackendUnavailableError,
    EmptyCorpusError,
    MissingPolarityClassError,
)
from .codec import ConversationTurn
from .datasets import DialogueConversation
from .metrics import (
    KL_CANDIDATE_ANCHOR,
    DistanceRow,
    cosine_similarity,
    distance_table,
    js_divergence,
    kl_divergence,
    rows_to_json,
    value_to_json,
)
from .references import CorpusPost, ReferenceRegistry, post_embedding
from .sessions import EmotionalProfile

DISCLAIMER = (
    "Not a diagnostic tool: screening output supports, never replaces, "
    "professional assessment."
)

METRICS = ("kl", "js", "cs")

_POLARITY_RANK = {"positive": 0, "negative": 1, "unused": 2}


@dataclass(frozen=True)
class MetricDecision:
    """Nearest reference under one metric and the label it implies."""

    nearest_reference: str | None
    value: float
    label: str

    def to_json(self) -> dict:
        return {
            "nearest_reference": self.nearest_reference,
            "value": value_to_json(self.value),
            "label": self.label,
        }


@dataclass(frozen=True)
class ScreeningResult:
    per_metric: dict[str, MetricDecision]
    combined_label: str
    distance_rows: list[DistanceRow]

    def to_json(self) -> dict:
        return {
            "per_metric": {m: d.to_json() for m, d in self.per_metric.items()},
            "combined_label": self.combined_label,
            "distance_rows": rows_to_json(self.distance_rows),
            "disclaimer": DISCLAIMER,
        }


def screen(
    sample: EmotionalProfile,
    registry: ReferenceRegistry,
    *,
    include_unused: bool = False,
    kl_direction: str = KL_CANDIDATE_ANCHOR,
) -> ScreeningResult:
    """Classify a sample profile by its nearest reference per metric."""
    refs = registry.screening_references(include_unused)
    if not registry.by_polarity("positive") or not registry.by_polarity("negative"):
        raise MissingPolarityClassError(
            "screening needs at least one positive and one negative reference"
        )
    anchor = sample.distribution
    entries = []
    for index, ref in enumerate(refs):
        if kl_direction == KL_CANDIDATE_ANCHOR:
            kl = kl_divergence(ref.distribution, anchor)
        else:
            kl = kl_divergence(anchor, ref.distribution)
        entries.append(
            {
                "index": index,
                "ref": ref,
                "kl": kl,
                "js": js_divergence(ref.distribution, anchor),
                "cs": cosine_similarity(ref.distribution, anchor),
            }
        )

    per_metric: dict[str, MetricDecision] = {}
    for metric in METRICS:
        per_metric[metric] = _decide(entries, metric)
    combined = "positive" if any(d.label == "positive" for d in per_metric.values()) else "negative"
    rows = distance_table(
        anchor, [(r.name, r.distribution) for r in refs], kl_direction=kl_direction
    )
    return ScreeningResult(per_metric=per_metric, combined_label=combined, distance_rows=rows)


def _decide(entries: list[dict], metric: str) -> MetricDecision:
    if metric == "cs":
        key = lambda e: (-e["cs"], _POLARITY_RANK[e["ref"].polarity], e["index"])
        candidates = entries
    else:
        key = lambda e: (e[metric], _POLARITY_RANK[e["ref"].polarity], e["index"])
        candidates = [e for e in entries if not math.isinf(e[metric])]
    if not candidates:
        # Every reference is infinitely far; no nearest exists for this metric.
        return MetricDecision(nearest_reference=None, value=math.inf, label="negative")
    best = min(candidates, key=key)
    label = "positive" if best["ref"].polarity == "positive" else "negative"
    return MetricDecision(nearest_reference=best["ref"].name, value=best[metric], label=label)


@dataclass(frozen=True)
class BinaryReport:
    """Precision/recall/F1/accuracy plus the confusion counts behind them."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if (self.tp + self.fp) else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if (self.tp + self.fn) else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if (p + r) else 0.0

    @property
    def accuracy(self) -> float:
        total = self.tp + self.fp + self.tn + self.fn
        return (self.tp + self.tn) / total if total else 0.0

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "confusion": {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn},
        }


@dataclass(frozen=True)
class ScreeningItem:
    """One evaluated post: gold label and each method's prediction."""

    id: str
    gold: str
    labels: dict[str, str]


@dataclass(frozen=True)
class ScreeningEvalReport:
    per_method: dict[str, BinaryReport]
    items: list[ScreeningItem]
    skipped: int

    @property
    def total(self) -> int:
        return len(self.items)

    def to_json(self) -> dict:
        return {
            "per_method": {m: r.to_json() for m, r in self.per_method.items()},
            "total": self.total,
            "skipped": self.skipped,
            "disclaimer": DISCLAIMER,
        }


def evaluate_screening(
    dataset: list[tuple[CorpusPost, str]],
    registry: ReferenceRegistry,
    backend,
    *,
    samples_per_segment: int = 10,
    include_unused: bool = False,
    kl_direction: str = KL_CANDIDATE_ANCHOR,
    checkpoint_path: Path | str | None = None,
) -> ScreeningEvalReport:
    """Screen every post and tally per-method and combined confusion.

    Gold labels must be "positive" or "negative".  On backend failure the
    progress so far is written to ``checkpoint_path`` (JSONL, one item per
    line) and the error re-raised; a later run resumes from that file.
    """
    for _, gold in dataset:
        if gold not in ("positive", "negative"):
            raise ValueError(f"gold labels must be positive|negative, got {gold!r}")

    done: dict[str, ScreeningItem] = {}
    if checkpoint_path is not None and Path(checkpoint_path).exists():
        with Path(checkpoint_path).open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    record = json.loads(line)
                    done[record["id"]] = ScreeningItem(
                        id=record["id"], gold=record["gold"], labels=record["labels"]
                    )

    items: list[ScreeningItem] = []
    skipped = 0
    for post, gold in dataset:
        if post.id in done:
            items.append(done[post.id])
            continue
        try:
            embedding = post_embedding(post, backend, samples_per_segment)
        except (EmptyCorpusError, AllSamplesDiscardedError):
            skipped += 1
            continue
        except BackendUnavailableError:
            if checkpoint_path is not None:
                _write_checkpoint(checkpoint_path, items)
            raise
        result = screen(
            embedding, registry, include_unused=include_unused, kl_direction=kl_direction
        )
        labels = {m: d.label for m, d in result.per_metric.items()}
        labels["combined"] = result.combined_label
        items.append(ScreeningItem(id=post.id, gold=gold, labels=labels))

    if checkpoint_path is not None:
        _write_checkpoint(checkpoint_path, items)

    per_method = {}
    for method in (*METRICS, "combined"):
        tp = sum(1 for i in items if i.labels[method] == "positive" and i.gold == "positive")
        fp = sum(1 for i in items if i.labels[method] == "positive" and i.gold == "negative")
        tn = sum(1 for i in items if i.labels[method] == "negative" and i.gold == "negative")
        fn = sum(1 for i in items if i.labels[method] == "negative" and i.gold == "positive")
        per_method[method] = BinaryReport(tp=tp, fp=fp, tn=tn, fn=fn)
    return ScreeningEvalReport(per_method=per_method, items=items, skipped=skipped)


def _write_checkpoint(path: Path | str, items: list[ScreeningItem]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps({"id": item.id, "gold": item.gold, "labels": item.labels}) + "\n")


def render_screening_report(report: ScreeningEvalReport) -> str:
    lines = [
        DISCLAIMER,
        "",
        f"{'method':<10} {'prec':>6} {'rec':>6} {'f1':>6} {'acc':>6}",
    ]
    for method, r in report.per_method.items():
        lines.append(
            f"{method:<10} {r.precision:>6.2f} {r.recall:>6.2f} {r.f1:>6.2f} {r.accuracy:>6.2f}"
        )
    lines.append(f"total: {report.total} evaluated, {report.skipped} skipped")
    return "\n".join(lines)


@dataclass(frozen=True)
class ClassRow:
    label: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassificationReport:
    """Per-emotion precision/recall/F1/support with the usual averages."""

    rows: list[ClassRow]
    accuracy: float
    macro_avg: tuple[float, float, float]
    weighted_avg: tuple[float, float, float]
    total: int

    def to_json(self) -> dict:
        return {
            "rows": [
                {
                    "label": r.label,
                    "precision": r.precision,
                    "recall": r.recall,
                    "f1": r.f1,
                    "support": r.support,
                }
                for r in self.rows
            ],
            "accuracy": self.accuracy,
            "macro_avg": dict(zip(("precision", "recall", "f1"), self.macro_avg)),
            "weighted_avg": dict(zip(("precision", "recall", "f1"), self.weighted_avg)),
            "total": self.total,
        }


def classification_report(pairs: list[tuple[str, str]]) -> ClassificationReport:
    """Multiclass report from (gold, predicted) pairs.

    Rows cover every label that appears as gold or prediction, in
    vocabulary order; averages run over labels with support > 0.
    """
    golds = [g for g, _ in pairs]
    preds = [p for _, p in pairs]
    rows: list[ClassRow] = []
    for label in VOCABULARY.labels:
        support = sum(1 for g in golds if g == label)
        predicted = sum(1 for p in preds if p == label)
        if support == 0 and predicted == 0:
            continue
        tp = sum(1 for g, p in pairs if g == label and p == label)
        precision = tp / predicted if predicted else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
        rows.append(ClassRow(label, precision, recall, f1, support))

    supported = [r for r in rows if r.support > 0]
    total = len(pairs)
    if supported:
        macro = (
            sum(r.precision for r in supported) / len(supported),
            sum(r.recall for r in supported) / len(supported),
            sum(r.f1 for r in supported) / len(supported),
        )
        weighted = (
            sum(r.precision * r.support for r in supported) / total,
            sum(r.recall * r.support for r in supported) / total,
            sum(r.f1 * r.support for r in supported) / total,
        )
    else:
        macro = weighted = (0.0, 0.0, 0.0)
    accuracy = sum(1 for g, p in pairs if g == p) / total if total else 0.0
    return ClassificationReport(
        rows=rows, accuracy=accuracy, macro_avg=macro, weighted_avg=weighted, total=total
    )


@dataclass(frozen=True)
class EmotionEvalReport:
    prompt_level: ClassificationReport
    conversation_level: ClassificationReport

    def to_json(self) -> dict:
        return {
            "prompt_level": self.prompt_level.to_json(),
            "conversation_level": self.conversation_level.to_json(),
        }


def evaluate_emotion_classification(
    conversations: list[DialogueConversation], backend
) -> EmotionEvalReport:
    """Score per-prompt and per-conversation emotion prediction.

    History grows with each speaker prompt, its predicted emotion, and the
    dataset's (gold) listener response, so later predictions see the same
    context the dataset intended.
    """
    prompt_pairs: list[tuple[str, str]] = []
    conversation_pairs: list[tuple[str, str]] = []
    for conversation in conversations:
        history: list[ConversationTurn] = []
        merged: list[str] = []
        utterances = conversation.utterances
        for i, (role, text) in enumerate(utterances):
            if role != "speaker":
                continue
            try:
                samples = sample_emotions(backend, history, text)
            except AllSamplesDiscardedError:
                continue
            predicted = argmax_emotion(samples)
            prompt_pairs.append((conversation.gold_emotion, predicted))
            merged.extend(samples.samples)
            gold_response = ""
            if i + 1 < len(utterances) and utterances[i + 1][0] == "listener":
                gold_response = utterances[i + 1][1]
            history.append(ConversationTurn(prompt=text, emotion=predicted, response=gold_response))
        if merged:
            conversation_pairs.append(
                (conversation.gold_emotion, argmax_emotion(EmotionSampleSet(tuple(merged))))
            )
    return EmotionEvalReport(
        prompt_level=classification_report(prompt_pairs),
        conversation_level=classification_report(conversation_pairs),
    )


def render_classification_report(report: ClassificationReport, title: str) -> str:
    width = max([len("weighted avg")] + [len(r.label) for r in report.rows])
    lines = [
        title,
        f"{'emotion':<{width}} {'precision':>9} {'recall':>7} {'f1':>6} {'support':>8}",
    ]
    for r in report.rows:
        lines.append(
            f"{r.label:<{width}} {r.precision:>9.2f} {r.recall:>7.2f} {r.f1:>6.2f} {r.support:>8}"
        )
    mp, mr, mf = report.macro_avg
    wp, wr, wf = report.weighted_avg
    lines.append(f"{'macro avg':<{width}} {mp:>9.2f} {mr:>7.2f} {mf:>6.2f} {report.total:>8}")
    lines.append(f"{'weighted avg':<{width}} {wp:>9.2f} {wr:>7.2f} {wf:>6.2f} {report.total:>8}")
    lines.append(f"accuracy: {report.accuracy:.2f}  ({report.total} items)")
    return "\n".join(lines)
