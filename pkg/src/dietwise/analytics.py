"""Survey and evaluation arithmetic: sample sizing, confusion-matrix
metrics, net promoter score on the 0-5 banding, and Likert summaries.

Rounding is half-up (one decimal for NPS, two for Likert means); raw
full-precision values are kept alongside the rounded readouts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .errors import UndefinedMetricError, ValidationError

LIKERT_MIN, LIKERT_MAX = 1, 5
NPS_MIN, NPS_MAX = 0, 5


@dataclass(frozen=True)
class SampleSizeSpec:
    z: float
    p: float
    e: float

    def validate(self) -> None:
        if self.z <= 0:
            raise ValidationError("z must be positive")
        if not 0 <= self.p <= 1:
            raise ValidationError("p must be in [0, 1]")
        if not 0 < self.e < 1:
            raise ValidationError("e must be in (0, 1)")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def validate(self) -> None:
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricReport:
    precision: float
    recall: float
    accuracy: float
    f1: float

    def as_percentages(self) -> dict[str, str]:
        """Two-decimal half-up percentage strings, e.g. '90.79%'."""
        return {
            name: f"{round_half_up(getattr(self, name) * 100, 2):.2f}%"
            for name in ("precision", "accuracy", "recall", "f1")
        }


@dataclass(frozen=True)
class SurveyResponse:
    respondent_id: str
    item_id: str
    rating: int


@dataclass(frozen=True)
class NpsBreakdown:
    promoters: int
    passives: int
    detractors: int
    score: float  # already rounded half-up to one decimal


def round_half_up(value: float, decimals: int) -> float:
    quantum = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def sample_size(spec: SampleSizeSpec) -> int:
    """ceil(z^2 * p * (1-p) / e^2)."""
    spec.validate()
    variance = spec.p * (1 - spec.p)
    if variance == 0:
        raise ValidationError("degenerate proportion: p*(1-p) must be positive")
    return math.ceil(spec.z ** 2 * variance / spec.e ** 2)


def compute_metrics(counts: ConfusionCounts) -> MetricReport:
    counts.validate()
    undefined = []
    if counts.tp + counts.fp == 0:
        undefined.append("precision")
    if counts.tp + counts.fn == 0:
        undefined.append("recall")
    if counts.total == 0:
        undefined.append("accuracy")
    if undefined:
        raise UndefinedMetricError(
            f"undefined metric(s): {', '.join(undefined)} (zero denominator)", undefined)
    precision = counts.tp / (counts.tp + counts.fp)
    recall = counts.tp / (counts.tp + counts.fn)
    accuracy = (counts.tp + counts.tn) / counts.total
    if precision + recall == 0:
        raise UndefinedMetricError("undefined metric(s): f1 (zero denominator)", ["f1"])
    f1 = 2 * precision * recall / (precision + recall)
    return MetricReport(precision=precision, recall=recall, accuracy=accuracy, f1=f1)


def nps(ratings: list[int]) -> NpsBreakdown:
    """0-5 banding: <=2 detractor, 3 passive, >=4 promoter."""
    if not ratings:
        raise ValidationError("empty sample: need at least one rating")
    for r in ratings:
        if not NPS_MIN <= r <= NPS_MAX:
            raise ValidationError(f"rating {r} outside [{NPS_MIN}, {NPS_MAX}]")
    promoters = sum(1 for r in ratings if r >= 4)
    passives = sum(1 for r in ratings if r == 3)
    detractors = sum(1 for r in ratings if r <= 2)
    score = round_half_up(100 * (promoters - detractors) / len(ratings), 1)
    return NpsBreakdown(promoters=promoters, passives=passives,
                        detractors=detractors, score=score)


def likert_summary(responses: list[SurveyResponse]) -> dict[str, dict]:
    """Per-item mean (2 decimals, half-up), histogram, satisfaction share.

    Satisfaction share is the fraction of responses rated >= 4.
    """
    by_item: dict[str, list[int]] = {}
    for resp in responses:
        if not LIKERT_MIN <= resp.rating <= LIKERT_MAX:
            raise ValidationError(
                f"rating {resp.rating} for item {resp.item_id!r} outside "
                f"[{LIKERT_MIN}, {LIKERT_MAX}]")
        by_item.setdefault(resp.item_id, []).append(resp.rating)
    summary = {}
    for item_id, ratings in by_item.items():
        histogram = {value: ratings.count(value)
                     for value in range(LIKERT_MIN, LIKERT_MAX + 1)}
        summary[item_id] = {
            "count": len(ratings),
            "mean": round_half_up(sum(ratings) / len(ratings), 2),
            "histogram": histogram,
            "satisfied_share": sum(1 for r in ratings if r >= 4) / len(ratings),
        }
    return summary
