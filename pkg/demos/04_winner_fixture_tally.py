"""Tally the bundled golden winner tables.

The package ships a CSV of 160 winner-letter cells (10 images x 4
metrics x 4 ratios) used as a regression fixture for the tally
pipeline. This script folds them into per-pair and aggregate counts and
the resulting achieved percentages.
Run with: python3 demos/04_winner_fixture_tally.py
"""

from nnround.evalstat import achieved_percentage, lower_bound, margin_of_error
from nnround.fixtures import load_winner_fixture, pair_counts, tally_fixture
from nnround.rounding import RoundingRule

cases = load_winner_fixture()
print(f"{len(cases)} fixture cases loaded")

print("\nPer-pair (floor, ceil, round) winner counts:")
for pair, counts in pair_counts(cases).items():
    print(f"  images {pair:>5}: F={counts[0]:>2}  C={counts[1]:>2}  R={counts[2]:>2}")

t = tally_fixture(cases)
print(f"\nAggregate of {t.targeted} targeted occurrences:")
for rule in (RoundingRule.CEIL, RoundingRule.HALF_AWAY_FROM_ZERO, RoundingRule.FLOOR):
    pct = achieved_percentage(t, rule)
    print(f"  {rule.display_name:>5}: {t.achieved[rule]}/{t.targeted} "
          f"({pct * 100:g}%)")

margin = margin_of_error(t.targeted, 800000, p=0.5, z=1.96)
print(f"\nMargin of error projecting to 800,000 occurrences: {margin * 100:.2f}%")
for rule in (RoundingRule.CEIL, RoundingRule.HALF_AWAY_FROM_ZERO, RoundingRule.FLOOR):
    lb = lower_bound(achieved_percentage(t, rule), margin)
    print(f"  {rule.display_name:>5} achieves at least {lb * 100:.2f}% "
          "in a large image population")
