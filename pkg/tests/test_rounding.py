import math
import random

import pytest

from nnround.rounding import ALL_RULES, RoundingRule, round_value

F = RoundingRule.FLOOR
C = RoundingRule.CEIL
R = RoundingRule.HALF_AWAY_FROM_ZERO
T = RoundingRule.TOWARD_ZERO
E = RoundingRule.HALF_TO_EVEN


# Golden 20-cell table for the four half-integer inputs across the five
# rules.  The ceil row is asserted with the mathematical definition
# (+11.5 -> +12, +12.5 -> +13).
GOLDEN = {
    E: {11.5: 12, 12.5: 12, -11.5: -12, -12.5: -12},
    R: {11.5: 12, 12.5: 13, -11.5: -12, -12.5: -13},
    T: {11.5: 11, 12.5: 12, -11.5: -11, -12.5: -12},
    C: {11.5: 12, 12.5: 13, -11.5: -11, -12.5: -12},
    F: {11.5: 11, 12.5: 12, -11.5: -12, -12.5: -13},
}


@pytest.mark.parametrize("rule", ALL_RULES)
@pytest.mark.parametrize("x", [11.5, 12.5, -11.5, -12.5])
def test_half_integer_golden_cells(rule, x):
    assert round_value(x, rule) == GOLDEN[rule][x]


@pytest.mark.parametrize("rule", ALL_RULES)
def test_integers_are_fixed_points(rule):
    for n in range(-10, 11):
        assert round_value(float(n), rule) == n


@pytest.mark.parametrize("rule", ALL_RULES)
@pytest.mark.parametrize("x", [math.inf, -math.inf, math.nan])
def test_non_finite_rejected(rule, x):
    with pytest.raises(ValueError):
        round_value(x, rule)


def test_non_half_fractions_agree_with_nearest():
    # away-from-zero and to-even only differ on exact halves
    rng = random.Random(7)
    for _ in range(500):
        x = rng.uniform(-100, 100)
        if (x - math.floor(x)) == 0.5:
            continue
        expected = math.floor(x + 0.5) if (x - math.floor(x)) > 0.5 else math.floor(x)
        assert round_value(x, R) == round_value(x, E) == expected


def test_ordering_and_bracketing():
    rng = random.Random(11)
    for _ in range(500):
        x = rng.uniform(-50, 50)
        lo, hi = round_value(x, F), round_value(x, C)
        if x >= 0:
            assert lo <= round_value(x, T) <= hi
        for rule in ALL_RULES:
            r = round_value(x, rule)
            assert lo <= r <= hi
            assert abs(r - x) < 1


@pytest.mark.parametrize("rule", ALL_RULES)
def test_monotonicity(rule):
    rng = random.Random(13)
    xs = sorted(rng.uniform(-20, 20) for _ in range(300))
    rounded = [round_value(x, rule) for x in xs]
    assert rounded == sorted(rounded)


def test_half_integer_split_nonnegative():
    for n in range(0, 50):
        x = n + 0.5
        assert round_value(x, R) == round_value(x, C)
        assert round_value(x, T) == round_value(x, F)


def test_names_and_letters():
    assert [r.display_name for r in ALL_RULES] == [
        "floor",
        "ceil",
        "round",
        "fix",
        "even",
    ]
    assert RoundingRule.from_name("CEIL") is C
    assert RoundingRule.from_name(" Round ") is R
    assert RoundingRule.from_letter("F") is F
    with pytest.raises(ValueError):
        RoundingRule.from_name("trunc")
    with pytest.raises(ValueError):
        RoundingRule.from_letter("X")
