"""Subprocess adapter for no-reference scorers (BRISQUE, NIQE, user tools).

Wire protocol: the image path is appended as the final argument; the tool
must exit 0 and print exactly one finite decimal number on the first line
of standard output.
"""

from __future__ import annotations

import math
import subprocess
from dataclasses import dataclass
from pathlib import Path

from .metrics import MetricId


class ExternalScorerError(RuntimeError):
    """Base class for external-scorer failures."""


class ScorerFailedError(ExternalScorerError):
    pass


class ScoreParseError(ExternalScorerError):
    pass


class ScorerTimeoutError(ExternalScorerError):
    pass


@dataclass(frozen=True)
class ExternalScorer:
    metric: MetricId
    command: tuple[str, ...]
    timeout: float = 60.0

    def __post_init__(self):
        if not self.command:
            raise ValueError("scorer command must be non-empty")
        if self.timeout <= 0:
            raise ValueError("scorer timeout must be positive")


def score_external(scorer: ExternalScorer, image_path: str | Path) -> float:
    """Invoke the scorer on one image file and parse its score."""
    argv = [*scorer.command, str(image_path)]
    try:
        proc = subprocess.run(
            argv, capture_output=True, text=True, timeout=scorer.timeout
        )
    except subprocess.TimeoutExpired:
        raise ScorerTimeoutError(
            f"{argv[0]} timed out after {scorer.timeout}s on {image_path}"
        ) from None
    if proc.returncode != 0:
        detail = proc.stderr.strip().splitlines()
        raise ScorerFailedError(
            f"{argv[0]} exited {proc.returncode}"
            + (f": {detail[0]}" if detail else "")
        )
    lines = proc.stdout.splitlines()
    first = lines[0].strip() if lines else ""
    tokens = first.split()
    if len(tokens) != 1:
        raise ScoreParseError(
            f"expected one number on the first output line, got {first!r}"
        )
    try:
        value = float(tokens[0])
    except ValueError:
        raise ScoreParseError(f"unparseable score {tokens[0]!r}") from None
    if not math.isfinite(value):
        raise ScoreParseError(f"non-finite score {value!r}")
    return value
