"""Winner determination, occurrence tallying, and margin-of-error projection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .metrics import MetricId, Polarity
from .rounding import RoundingRule


@dataclass(frozen=True)
class ScoreCase:
    """Scores for one (image, ratio, metric) cell across the evaluated rules."""

    image_id: str
    ratio: int
    metric: MetricId
    scores: Mapping[RoundingRule, float]


def winners(case: ScoreCase, tie_epsilon: float = 0.0) -> frozenset[RoundingRule]:
    """Rules whose score is within tie_epsilon (absolute) of the best.

    Best is the minimum for lower-better metrics, the maximum otherwise.
    """
    if tie_epsilon < 0:
        raise ValueError("tie_epsilon must be nonnegative")
    if len(case.scores) < 2:
        raise ValueError(
            f"case ({case.image_id}, ratio {case.ratio}, {case.metric.name}) "
            "needs at least two scored rules"
        )
    values = case.scores.values()
    if case.metric.polarity is Polarity.LOWER_BETTER:
        best = min(values)
        return frozenset(r for r, s in case.scores.items() if s <= best + tie_epsilon)
    best = max(values)
    return frozenset(r for r, s in case.scores.items() if s >= best - tie_epsilon)


@dataclass(frozen=True)
class OccurrenceTally:
    """Achieved winner counts per rule against the targeted maximum."""

    achieved: Mapping[RoundingRule, int]
    targeted: int


def tally(
    winner_sets: Iterable[frozenset[RoundingRule]],
    rule_set: Sequence[RoundingRule],
    targeted: int,
) -> OccurrenceTally:
    """Count, per rule, how many winner sets contain it (ties multi-count)."""
    counts = {rule: 0 for rule in rule_set}
    for ws in winner_sets:
        for rule in ws:
            if rule in counts:
                counts[rule] += 1
    return OccurrenceTally(counts, targeted)


def achieved_percentage(t: OccurrenceTally, rule: RoundingRule) -> float:
    """Fraction of targeted occurrences the rule achieved (0..1)."""
    if t.targeted <= 0:
        raise ValueError("targeted count must be positive")
    return t.achieved[rule] / t.targeted


@dataclass(frozen=True)
class MoEResult:
    """Margin of error for a proportion, with finite population correction."""

    sample_size: int
    population_size: int
    proportion: float
    z: float
    margin: float


def margin_of_error(n: int, population: int, p: float = 0.5, z: float = 1.96) -> float:
    """Half-width of the normal-approximation confidence interval.

    z * sqrt(p(1-p)/n) * sqrt((N-n)/(N-1)); the second factor is the
    finite population correction, which vanishes when n = N.
    """
    if n < 1 or population < n:
        raise ValueError(f"need 0 < n <= population, got n={n}, N={population}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"proportion must lie in [0, 1], got {p}")
    if z <= 0:
        raise ValueError(f"z must be positive, got {z}")
    if population == 1:
        return 0.0
    fpc = math.sqrt((population - n) / (population - 1))
    return z * math.sqrt(p * (1.0 - p) / n) * fpc


def lower_bound(p_hat: float, margin: float) -> float:
    """Conservative achievable proportion: p_hat - margin, clamped at 0."""
    return max(p_hat - margin, 0.0)
