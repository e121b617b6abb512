import sys

import numpy as np
import pytest

from nnround.cli import main
from nnround.harness import (
    ConfigError,
    EvalConfig,
    ImageSpec,
    MetricSpec,
    divisible_crop,
    emit_reports,
    load_config,
    prepare_case,
    run_grid,
)
from nnround.metrics import KNOWN_METRICS, metric_by_name
from nnround.extscore import ExternalScorer
from nnround.raster import CropRect, PixelBuffer, save_pnm
from nnround.rounding import RoundingRule

MSE = KNOWN_METRICS["MSE"]
SSIM = KNOWN_METRICS["SSIM"]


def make_image(path, size=40, seed=0):
    rng = np.random.default_rng(seed)
    buf = PixelBuffer(rng.integers(0, 256, size=(size, size, 1), dtype=np.uint8))
    path.write_bytes(save_pnm(buf))
    return buf


def small_config(tmp_path, n_images=2, size=40, metrics=None, **kwargs):
    images = []
    for i in range(n_images):
        path = tmp_path / f"img{i}.pgm"
        make_image(path, size=size, seed=i)
        images.append(ImageSpec(f"img{i}", path))
    if metrics is None:
        metrics = (MetricSpec(MSE), MetricSpec(SSIM))
    defaults = dict(
        images=tuple(images),
        metrics=tuple(metrics),
        ratios=(2, 3),
        output_dir=tmp_path / "out",
    )
    defaults.update(kwargs)
    return EvalConfig(**defaults)


def test_prepare_case_sizes():
    rng = np.random.default_rng(1)
    img = PixelBuffer(rng.integers(0, 256, size=(512, 512, 1), dtype=np.uint8))
    ref, src = prepare_case(img, 4)
    assert (ref.width, src.width) == (512, 128)
    ref, src = prepare_case(img, 3, CropRect(1, 1, 510, 510))
    assert (ref.width, src.width) == (510, 170)
    ref, src = prepare_case(img, 5, CropRect(1, 1, 510, 510))
    assert (ref.width, src.width) == (510, 102)


def test_prepare_case_rejects_non_divisible_with_suggestion():
    rng = np.random.default_rng(2)
    img = PixelBuffer(rng.integers(0, 256, size=(512, 512, 1), dtype=np.uint8))
    with pytest.raises(ValueError, match="510"):
        prepare_case(img, 3)


def test_divisible_crop():
    rng = np.random.default_rng(3)
    img = PixelBuffer(rng.integers(0, 256, size=(512, 512, 1), dtype=np.uint8))
    rect = divisible_crop(img, 3)
    assert (rect.width, rect.height, rect.left, rect.top) == (510, 510, 1, 1)
    assert divisible_crop(img, 4) is None


def test_targeted_count_is_grid_product(tmp_path):
    config = small_config(tmp_path, n_images=2)  # 2 images x 2 metrics x 2 ratios
    result = run_grid(config)
    assert result.tally.targeted == 8
    assert len(result.records) == 8 * len(config.rules)


def test_run_grid_deterministic_outputs(tmp_path):
    config = small_config(tmp_path)
    first = emit_reports(run_grid(config), config)
    contents = {p.name: p.read_bytes() for p in first}
    second = emit_reports(run_grid(config), config)
    for p in second:
        assert p.read_bytes() == contents[p.name]


def test_run_grid_parallel_matches_serial(tmp_path):
    serial = small_config(tmp_path, jobs=1)
    parallel = small_config(tmp_path, jobs=4)
    a = run_grid(serial)
    b = run_grid(parallel)
    assert a.records == b.records
    assert a.tally == b.tally


def test_ratio_2_ceil_round_tie_in_grid(tmp_path):
    config = small_config(tmp_path, ratios=(2,))
    result = run_grid(config)
    for rec in result.records:
        if rec.rule in (RoundingRule.CEIL, RoundingRule.HALF_AWAY_FROM_ZERO):
            partner = [
                r
                for r in result.records
                if (r.image_id, r.ratio, r.metric.name) ==
                   (rec.image_id, rec.ratio, rec.metric.name)
                and r.rule in (RoundingRule.CEIL, RoundingRule.HALF_AWAY_FROM_ZERO)
            ]
            assert len({r.winner for r in partner}) == 1


def test_external_scorer_in_grid(tmp_path):
    # deterministic fake no-reference scorer: file size in bytes
    scorer = ExternalScorer(
        metric_by_name("SIZE"),
        (sys.executable, "-c",
         "import sys, os; print(os.path.getsize(sys.argv[1]))"),
    )
    config = small_config(
        tmp_path, metrics=(MetricSpec(MSE), MetricSpec(scorer.metric, scorer))
    )
    result = run_grid(config)
    assert result.tally.targeted == 8
    size_scores = [
        r.score for r in result.records if r.metric.name == "SIZE"
    ]
    assert all(s is not None and s > 0 for s in size_scores)


def test_failing_scorer_voids_only_its_cells(tmp_path):
    bad = ExternalScorer(
        metric_by_name("BAD"), (sys.executable, "-c", "raise SystemExit(1)")
    )
    config = small_config(
        tmp_path, metrics=(MetricSpec(MSE), MetricSpec(bad.metric, bad))
    )
    result = run_grid(config)
    # MSE cases remain rankable; BAD cases are excluded from targeted
    assert result.tally.targeted == 4
    bad_records = [r for r in result.records if r.metric.name == "BAD"]
    assert all(r.score is None and not r.winner and r.error for r in bad_records)
    mse_records = [r for r in result.records if r.metric.name == "MSE"]
    assert all(r.score is not None for r in mse_records)
    assert any("excluded" in note for note in result.notes)


def test_emit_reports_files_and_shapes(tmp_path):
    config = small_config(tmp_path)
    result = run_grid(config)
    written = emit_reports(result, config)
    names = {p.name for p in written}
    assert names == {
        "winners.md",
        "scores.csv",
        "tally.csv",
        "projection.csv",
        "series_rescaled.csv",
    }
    tally_lines = (config.output_dir / "tally.csv").read_text().splitlines()
    assert tally_lines[0] == "rule,occurrences,percentage"
    assert tally_lines[1].startswith("floor,")
    assert "/8," in tally_lines[1]
    proj_lines = (config.output_dir / "projection.csv").read_text().splitlines()
    assert proj_lines[0].startswith("population,margin,lower_bound_floor")
    assert proj_lines[1].startswith("800,")
    scores_lines = (config.output_dir / "scores.csv").read_text().splitlines()
    assert scores_lines[0] == "image,ratio,metric,rule,score,winner"
    assert len(scores_lines) == 1 + len(result.records)
    winners_md = (config.output_dir / "winners.md").read_text()
    assert "| metric | ratio = 2 | ratio = 3 |" in winners_md
    assert "auto-cropped" in winners_md  # 40x40 not divisible by 3


def test_emit_reports_rejects_empty(tmp_path):
    from nnround.harness import GridResult
    from nnround.evalstat import OccurrenceTally

    config = small_config(tmp_path)
    empty = GridResult([], OccurrenceTally({}, 0), [])
    with pytest.raises(ValueError, match="nothing to report"):
        emit_reports(empty, config)


def test_config_round_trip_yaml(tmp_path):
    make_image(tmp_path / "a.pgm", size=24, seed=9)
    (tmp_path / "cfg.yaml").write_text(
        """
images:
  - id: a
    path: a.pgm
    crop: {left: 1, top: 1, width: 24, height: 24}
ratios: [2, 4]
metrics:
  - MSE
  - SSIM
rules: [floor, ceil, round]
tie_epsilon: 0.0
projection_populations: [800, 8000]
output_dir: results
"""
    )
    config = load_config(tmp_path / "cfg.yaml")
    assert config.images[0].id == "a"
    assert config.images[0].crop_rect == CropRect(1, 1, 24, 24)
    assert config.ratios == (2, 4)
    assert config.output_dir == tmp_path / "results"
    result = run_grid(config)
    assert result.tally.targeted == 4


def test_config_errors(tmp_path):
    (tmp_path / "bad.yaml").write_text("images: []\nmetrics: [MSE]\n")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.yaml")
    (tmp_path / "noref.yaml").write_text(
        "images: [{id: a, path: a.pgm}]\nmetrics: [BRISQUE]\n"
    )
    with pytest.raises(ConfigError, match="scorer command"):
        load_config(tmp_path / "noref.yaml")
    with pytest.raises(ConfigError):
        EvalConfig(
            images=(ImageSpec("a", tmp_path / "a.pgm"),),
            metrics=(MetricSpec(MSE),),
            ratios=(1,),
        )


def test_cli_run_and_overrides(tmp_path, capsys):
    make_image(tmp_path / "a.pgm", size=24, seed=10)
    make_image(tmp_path / "b.pgm", size=24, seed=11)
    (tmp_path / "cfg.yaml").write_text(
        """
images:
  - {id: a, path: a.pgm}
  - {id: b, path: b.pgm}
metrics: [MSE, SSIM]
ratios: [2, 3]
output_dir: out
"""
    )
    code = main(
        [
            "run",
            str(tmp_path / "cfg.yaml"),
            "--out",
            str(tmp_path / "cli_out"),
            "--ratios",
            "2",
            "--rules",
            "ceil",
            "round",
            "--jobs",
            "2",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "ceil:" in out and "round:" in out and "floor:" not in out
    assert (tmp_path / "cli_out" / "tally.csv").exists()


def test_cli_config_error_exit_code(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.yaml")]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_fixtures(capsys):
    assert main(["fixtures"]) == 0
    out = capsys.readouterr().out
    assert "aggregate: F/C/R = (36, 126, 56) of 160" in out
    assert "ceil: 78.75% achieved" in out
