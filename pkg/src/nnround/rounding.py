"""Scalar rounding kernels for the five IEEE 754-2008 rounding rules."""

from __future__ import annotations

import enum
import math


class RoundingRule(enum.Enum):
    """One of the five IEEE 754-2008 rounding rules.

    The enum value doubles as the configuration name ("floor", "ceil",
    "round", "fix", "even"), accepted case-insensitively by
    :meth:`from_name`.
    """

    FLOOR = "floor"
    CEIL = "ceil"
    HALF_AWAY_FROM_ZERO = "round"
    TOWARD_ZERO = "fix"
    HALF_TO_EVEN = "even"

    @property
    def display_name(self) -> str:
        return self.value

    @property
    def letter(self) -> str:
        """Single-letter label used in winner tables."""
        return _LETTERS[self]

    @classmethod
    def from_name(cls, name: str) -> "RoundingRule":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown rounding rule: {name!r}") from None

    @classmethod
    def from_letter(cls, letter: str) -> "RoundingRule":
        for rule, lt in _LETTERS.items():
            if lt == letter.strip().upper():
                return rule
        raise ValueError(f"unknown rounding-rule letter: {letter!r}")


_LETTERS = {
    RoundingRule.FLOOR: "F",
    RoundingRule.CEIL: "C",
    RoundingRule.HALF_AWAY_FROM_ZERO: "R",
    RoundingRule.TOWARD_ZERO: "T",
    RoundingRule.HALF_TO_EVEN: "E",
}

# Default rule set evaluated by the benchmark harness.
DEFAULT_RULES = (
    RoundingRule.FLOOR,
    RoundingRule.CEIL,
    RoundingRule.HALF_AWAY_FROM_ZERO,
)

ALL_RULES = tuple(RoundingRule)


def round_value(x: float, rule: RoundingRule) -> int:
    """Round a finite real to an integer under the given rule.

    Half-integer detection uses exact binary comparison (no epsilon):
    the fractional part of a float either is exactly 0.5 or it is not.
    """
    if not math.isfinite(x):
        raise ValueError(f"cannot round non-finite value {x!r}")

    if rule is RoundingRule.FLOOR:
        return math.floor(x)
    if rule is RoundingRule.CEIL:
        return math.ceil(x)
    if rule is RoundingRule.TOWARD_ZERO:
        return math.trunc(x)

    lo = math.floor(x)
    frac = x - lo
    if frac < 0.5:
        return lo
    if frac > 0.5:
        return lo + 1
    # exact tie
    if rule is RoundingRule.HALF_AWAY_FROM_ZERO:
        return lo + 1 if x > 0 else lo
    # HALF_TO_EVEN
    return lo if lo % 2 == 0 else lo + 1
