"""Command-line entry point: run an evaluation grid or the fixture suite."""

from __future__ import annotations

import argparse
import sys

from .evalstat import achieved_percentage
from .extscore import ExternalScorerError
from .fixtures import (
    EXPECTED_AGGREGATE,
    EXPECTED_PAIR_COUNTS,
    EXPECTED_TARGETED,
    load_winner_fixture,
    pair_counts,
    tally_fixture,
)
from .harness import ConfigError, apply_overrides, emit_reports, load_config, run_grid
from .rounding import RoundingRule

EXIT_CONFIG_ERROR = 2
EXIT_SCORER_ERROR = 3
EXIT_FIXTURE_MISMATCH = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nnround",
        description=(
            "Benchmark nearest-neighbor upscaling under different rounding "
            "rules and report winner tables, occurrence tallies, and "
            "margin-of-error projections."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate the grid described by a config file")
    run.add_argument("config", help="YAML configuration file")
    run.add_argument("--out", help="output directory (overrides config)")
    run.add_argument(
        "--rules",
        nargs="+",
        metavar="RULE",
        help="rounding rules: floor ceil round fix even",
    )
    run.add_argument("--ratios", nargs="+", type=int, metavar="N")
    run.add_argument("--tie-epsilon", type=float, dest="tie_epsilon")
    run.add_argument("--jobs", type=int, help="parallel scoring workers")

    fixtures = sub.add_parser(
        "fixtures", help="run the winner-table regression suite"
    )
    fixtures.add_argument("--csv", help="alternate fixture CSV path")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    config = apply_overrides(
        config,
        out=args.out,
        rules=args.rules,
        ratios=args.ratios,
        tie_epsilon=args.tie_epsilon,
        jobs=args.jobs,
    )
    result = run_grid(config)
    written = emit_reports(result, config)
    targeted = result.tally.targeted
    for rule in config.rules:
        achieved = result.tally.achieved[rule]
        pct = achieved_percentage(result.tally, rule) * 100 if targeted else 0.0
        print(f"{rule.display_name}: {achieved}/{targeted} ({pct:g}%)")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_fixtures(args) -> int:
    cases = load_winner_fixture(args.csv)
    counts = pair_counts(cases)
    total = tally_fixture(cases)
    ok = True
    for pair, expected in EXPECTED_PAIR_COUNTS.items():
        got = counts.get(pair)
        status = "ok" if got == expected else "MISMATCH"
        ok = ok and got == expected
        print(f"pair {pair}: F/C/R = {got} expected {expected} [{status}]")
    aggregate = (
        total.achieved[RoundingRule.FLOOR],
        total.achieved[RoundingRule.CEIL],
        total.achieved[RoundingRule.HALF_AWAY_FROM_ZERO],
    )
    agg_ok = aggregate == EXPECTED_AGGREGATE and total.targeted == EXPECTED_TARGETED
    ok = ok and agg_ok
    print(
        f"aggregate: F/C/R = {aggregate} of {total.targeted} "
        f"expected {EXPECTED_AGGREGATE} of {EXPECTED_TARGETED} "
        f"[{'ok' if agg_ok else 'MISMATCH'}]"
    )
    for rule in (
        RoundingRule.CEIL,
        RoundingRule.HALF_AWAY_FROM_ZERO,
        RoundingRule.FLOOR,
    ):
        print(
            f"{rule.display_name}: "
            f"{achieved_percentage(total, rule) * 100:g}% achieved"
        )
    return 0 if ok else EXIT_FIXTURE_MISMATCH


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_fixtures(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except ExternalScorerError as exc:
        print(f"scorer error: {exc}", file=sys.stderr)
        return EXIT_SCORER_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
