"""Run a small evaluation grid end to end and print the reports.

Three public-domain 512x512 images (bundled with scikit-image) are
downsampled by each ratio with a box filter, upscaled back with each
rounding rule, and scored with MSE and SSIM against the original. The
winner tallies and margin-of-error projections follow.
Run with: python3 demos/03_quality_grid.py
"""

import tempfile
from pathlib import Path

import skimage.data

from nnround import PixelBuffer, save_pnm
from nnround.evalstat import achieved_percentage, lower_bound
from nnround.fixtures import format_winner_letters
from nnround.harness import EvalConfig, ImageSpec, MetricSpec, emit_reports, run_grid
from nnround.metrics import KNOWN_METRICS

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    images = []
    for name in ("camera", "moon", "astronaut"):
        buf = PixelBuffer(getattr(skimage.data, name)())
        path = tmp / f"{name}.pnm"
        path.write_bytes(save_pnm(buf))
        images.append(ImageSpec(name, path))

    config = EvalConfig(
        images=tuple(images),
        metrics=(MetricSpec(KNOWN_METRICS["MSE"]), MetricSpec(KNOWN_METRICS["SSIM"])),
        ratios=(2, 3, 4, 5),
        output_dir=tmp / "out",
        jobs=2,
    )
    result = run_grid(config)

    print("Winner letters per case (F=floor, C=ceil, R=round):")
    by_case = {}
    for rec in result.records:
        if rec.winner:
            by_case.setdefault((rec.image_id, rec.metric.name, rec.ratio), set()).add(
                rec.rule
            )
    for (image, metric, ratio), rules in sorted(by_case.items()):
        print(f"  {image:>10} {metric:<4} ratio {ratio}: "
              f"{format_winner_letters(frozenset(rules))}")

    t = result.tally
    print(f"\nTally over {t.targeted} targeted occurrences:")
    for rule in config.rules:
        pct = achieved_percentage(t, rule)
        print(f"  {rule.display_name:>5}: {t.achieved[rule]}/{t.targeted} "
              f"({pct * 100:.2f}%)")

    print("\nProjections (95% confidence, worst-case p = 0.5):")
    for proj in result.projections:
        bounds = ", ".join(
            f"{rule.display_name} >= "
            f"{lower_bound(achieved_percentage(t, rule), proj.margin) * 100:.2f}%"
            for rule in config.rules
        )
        print(f"  population {proj.population_size:>7}: "
              f"margin {proj.margin * 100:.2f}% -> {bounds}")

    files = emit_reports(result, config)
    print("\nReport files written:")
    for f in files:
        print(f"  {f.name}")
