"""Bundled golden winner tables and regression checks for the tally pipeline.

The fixture CSV has columns image_pair, metric, ratio, winners; the
winners field holds rule letters joined by " & " (e.g. "F & C & R").
"""

from __future__ import annotations

import csv
import importlib.resources
from dataclasses import dataclass
from pathlib import Path

from .evalstat import OccurrenceTally, tally
from .rounding import RoundingRule

# Per-pair (floor, ceil, round) counts the bundled tables must reproduce.
EXPECTED_PAIR_COUNTS = {
    "1&2": (7, 27, 10),
    "3&4": (6, 25, 12),
    "5&6": (7, 24, 11),
    "7&8": (9, 26, 12),
    "9&10": (7, 24, 11),
}
EXPECTED_AGGREGATE = (36, 126, 56)  # floor, ceil, round of 160
EXPECTED_TARGETED = 160


@dataclass(frozen=True)
class FixtureCase:
    image_pair: str
    metric: str
    ratio: int
    winners: frozenset[RoundingRule]


def parse_winner_letters(text: str) -> frozenset[RoundingRule]:
    """Parse a winner cell like "C & R" into a rule set."""
    letters = [part.strip() for part in text.split("&")]
    if not letters or any(not lt for lt in letters):
        raise ValueError(f"malformed winners cell {text!r}")
    return frozenset(RoundingRule.from_letter(lt) for lt in letters)


def format_winner_letters(rules: frozenset[RoundingRule]) -> str:
    """Render a winner set as letters joined by " & ", in F/C/R/T/E order."""
    order = {rule: i for i, rule in enumerate(RoundingRule)}
    return " & ".join(r.letter for r in sorted(rules, key=lambda r: order[r]))


def load_winner_fixture(path: str | Path | None = None) -> list[FixtureCase]:
    """Read a winner-table fixture CSV; defaults to the bundled tables."""
    if path is None:
        resource = importlib.resources.files("nnround").joinpath(
            "data/winner_tables.csv"
        )
        text = resource.read_text()
    else:
        text = Path(path).read_text()
    cases = []
    for row in csv.DictReader(text.splitlines()):
        cases.append(
            FixtureCase(
                image_pair=row["image_pair"],
                metric=row["metric"],
                ratio=int(row["ratio"]),
                winners=parse_winner_letters(row["winners"]),
            )
        )
    return cases


def tally_fixture(
    cases: list[FixtureCase], rule_set=None
) -> OccurrenceTally:
    if rule_set is None:
        rule_set = (
            RoundingRule.FLOOR,
            RoundingRule.CEIL,
            RoundingRule.HALF_AWAY_FROM_ZERO,
        )
    return tally([c.winners for c in cases], rule_set, targeted=len(cases))


def pair_counts(cases: list[FixtureCase]) -> dict[str, tuple[int, int, int]]:
    """Per-pair (floor, ceil, round) winner counts."""
    out: dict[str, tuple[int, int, int]] = {}
    for pair in sorted({c.image_pair for c in cases}):
        t = tally_fixture([c for c in cases if c.image_pair == pair])
        out[pair] = (
            t.achieved[RoundingRule.FLOOR],
            t.achieved[RoundingRule.CEIL],
            t.achieved[RoundingRule.HALF_AWAY_FROM_ZERO],
        )
    return out
