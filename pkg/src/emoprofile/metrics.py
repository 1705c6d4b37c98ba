"""Divergences and similarity over emotion distributions.

Natural logarithm throughout.  No epsilon smoothing: KL propagates an IEEE
+infinity whenever the second argument lacks support where the first has
mass, and infinities serialize as the string "inf".  JS is always finite
and bounded by ln 2; cosine similarity lies in [0, 1] for simplex vectors.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .emotions import EmotionDistribution
from .errors import EmptyReferenceSetError

LN2 = math.log(2.0)

KL_CANDIDATE_ANCHOR = "candidate-anchor"
KL_ANCHOR_CANDIDATE = "anchor-candidate"


def kl_divergence(p: EmotionDistribution, q: EmotionDistribution) -> float:
    """Sum of p_i * ln(p_i / q_i); +inf when q lacks support under p."""
    pw, qw = p.weights, q.weights
    support = pw > 0
    if np.any(qw[support] == 0):
        return math.inf
    terms = pw[support] * np.log(pw[support] / qw[support])
    # Non-negative in exact arithmetic; guard the float dust.
    return max(0.0, float(terms.sum()))


def js_divergence(p: EmotionDistribution, q: EmotionDistribution) -> float:
    """Symmetric, finite divergence: mean KL to the midpoint, in nats."""
    m = (p.weights + q.weights) / 2.0
    return max(0.0, 0.5 * _kl_raw(p.weights, m) + 0.5 * _kl_raw(q.weights, m))


def _kl_raw(pw: np.ndarray, qw: np.ndarray) -> float:
    support = pw > 0
    return float((pw[support] * np.log(pw[support] / qw[support])).sum())


def cosine_similarity(p: EmotionDistribution, q: EmotionDistribution) -> float:
    """dot(p, q) / (|p| |q|); in [0, 1] since weights are non-negative."""
    pw, qw = p.weights, q.weights
    return float(pw @ qw / (np.linalg.norm(pw) * np.linalg.norm(qw)))


@dataclass(frozen=True)
class DistanceRow:
    """All three metrics for one reference against an anchor."""

    reference_name: str
    kl: float
    js: float
    cs: float


def distance_table(
    anchor: EmotionDistribution,
    references: Sequence[tuple[str, EmotionDistribution]],
    kl_direction: str = KL_CANDIDATE_ANCHOR,
) -> list[DistanceRow]:
    """One row per reference, sorted by KL ascending with infinities last.

    KL defaults to kl(candidate, anchor); ``kl_direction`` flips the
    argument order.  JS and CS are symmetric.  Sorting is stable, so
    equal-KL rows keep their input order.
    """
    if not references:
        raise EmptyReferenceSetError("distance table needs at least one reference")
    if kl_direction not in (KL_CANDIDATE_ANCHOR, KL_ANCHOR_CANDIDATE):
        raise ValueError(f"unknown kl_direction: {kl_direction!r}")
    rows = []
    for name, dist in references:
        if kl_direction == KL_CANDIDATE_ANCHOR:
            kl = kl_divergence(dist, anchor)
        else:
            kl = kl_divergence(anchor, dist)
        rows.append(
            DistanceRow(
                reference_name=name,
                kl=kl,
                js=js_divergence(dist, anchor),
                cs=cosine_similarity(dist, anchor),
            )
        )
    return sorted(rows, key=lambda r: r.kl)


def value_to_json(value: float) -> float | str:
    """Floats pass through; infinity becomes the string "inf"."""
    return "inf" if math.isinf(value) else value


def value_from_json(value: float | str) -> float:
    if value == "inf":
        return math.inf
    return float(value)


def rows_to_json(rows: Sequence[DistanceRow]) -> list[dict]:
    return [
        {
            "reference": r.reference_name,
            "kl": value_to_json(r.kl),
            "js": value_to_json(r.js),
            "cs": value_to_json(r.cs),
        }
        for r in rows
    ]


def rows_to_csv(rows: Sequence[DistanceRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["reference", "kl", "js", "cs"])
    for r in rows:
        writer.writerow(
            [r.reference_name, _csv_value(r.kl), _csv_value(r.js), _csv_value(r.cs)]
        )
    return buf.getvalue()


def _csv_value(value: float) -> str:
    return "inf" if math.isinf(value) else repr(value)


def pairwise_matrix(
    references: Sequence[tuple[str, EmotionDistribution]],
    kl_direction: str = KL_CANDIDATE_ANCHOR,
) -> dict:
    """Every reference against every reference, as the analysis artifact.

    Returns {"names": [...], "kl": [[...]], "js": [[...]], "cs": [[...]]}
    with row i holding metrics of each candidate j against anchor i.
    """
    if not references:
        raise EmptyReferenceSetError("pairwise matrix needs at least one reference")
    names = [name for name, _ in references]
    kl_m: list[list[float | str]] = []
    js_m: list[list[float | str]] = []
    cs_m: list[list[float | str]] = []
    for _, anchor in references:
        kl_row, js_row, cs_row = [], [], []
        for _, cand in references:
            if kl_direction == KL_CANDIDATE_ANCHOR:
                kl_row.append(value_to_json(kl_divergence(cand, anchor)))
            else:
                kl_row.append(value_to_json(kl_divergence(anchor, cand)))
            js_row.append(value_to_json(js_divergence(cand, anchor)))
            cs_row.append(value_to_json(cosine_similarity(cand, anchor)))
        kl_m.append(kl_row)
        js_m.append(js_row)
        cs_m.append(cs_row)
    return {"names": names, "kl": kl_m, "js": js_m, "cs": cs_m}


def render_distance_table(rows: Sequence[DistanceRow]) -> str:
    """Aligned text table with 3-decimal values and the literal "inf"."""
    name_width = max([len("reference")] + [len(r.reference_name) for r in rows])
    out = [f"{'reference':<{name_width}}  {'KL':>6}  {'JS':>6}  {'CS':>6}"]
    for r in rows:
        out.append(
            f"{r.reference_name:<{name_width}}  {_fmt3(r.kl):>6}  {_fmt3(r.js):>6}  {_fmt3(r.cs):>6}"
        )
    return "\n".join(out)


def _fmt3(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.3f}"


def distance_table_json(rows: Sequence[DistanceRow]) -> str:
    return json.dumps(rows_to_json(rows), indent=2)
