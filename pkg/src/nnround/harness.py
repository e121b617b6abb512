"""Configuration-driven evaluation grid: images x ratios x metrics x rules."""

from __future__ import annotations

import concurrent.futures
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from . import evalstat, metrics
from .extscore import ExternalScorer, ExternalScorerError, score_external
from .fixtures import format_winner_letters
from .metrics import MetricId, MetricKind, Polarity, metric_by_name
from .raster import CropRect, PixelBuffer, crop, downsample_box, load_pnm, save_pnm
from .nn_scale import resize_nn
from .rounding import DEFAULT_RULES, RoundingRule


class ConfigError(ValueError):
    """Invalid or unreadable evaluation configuration."""


@dataclass(frozen=True)
class ImageSpec:
    id: str
    path: Path
    crop_rect: CropRect | None = None


@dataclass(frozen=True)
class MetricSpec:
    metric: MetricId
    scorer: ExternalScorer | None = None


@dataclass(frozen=True)
class EvalConfig:
    images: tuple[ImageSpec, ...]
    metrics: tuple[MetricSpec, ...]
    ratios: tuple[int, ...] = (2, 3, 4, 5)
    rules: tuple[RoundingRule, ...] = DEFAULT_RULES
    tie_epsilon: float = 0.0
    proportion: float = 0.5
    z: float = 1.96
    projection_populations: tuple[int, ...] = (800, 8000, 80000, 800000)
    output_dir: Path = Path("out")
    jobs: int = 1

    def __post_init__(self):
        if not self.images or not self.metrics or not self.ratios or not self.rules:
            raise ConfigError("images, metrics, ratios, and rules must be non-empty")
        if any(r < 2 for r in self.ratios):
            raise ConfigError("ratios must be >= 2 for the upscale pipeline")
        if self.tie_epsilon < 0:
            raise ConfigError("tie_epsilon must be nonnegative")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


def _parse_crop(node) -> CropRect:
    try:
        return CropRect(
            left=int(node["left"]),
            top=int(node["top"]),
            width=int(node["width"]),
            height=int(node["height"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad crop rectangle {node!r}: {exc}") from None


def _parse_metric(node) -> MetricSpec:
    if isinstance(node, str):
        metric = metric_by_name(node)
        if metric.kind is MetricKind.NO_REFERENCE:
            raise ConfigError(
                f"no-reference metric {node!r} needs a scorer command"
            )
        return MetricSpec(metric)
    if not isinstance(node, dict) or "name" not in node:
        raise ConfigError(f"bad metric entry {node!r}")
    polarity = (
        Polarity.HIGHER_BETTER
        if str(node.get("polarity", "lower")).lower().startswith("higher")
        else Polarity.LOWER_BETTER
    )
    metric = metric_by_name(str(node["name"]), polarity=polarity)
    command = node.get("command")
    if command is None:
        if metric.kind is MetricKind.NO_REFERENCE:
            raise ConfigError(
                f"no-reference metric {metric.name!r} needs a scorer command"
            )
        return MetricSpec(metric)
    if isinstance(command, str):
        command = command.split()
    scorer = ExternalScorer(
        metric=metric,
        command=tuple(str(c) for c in command),
        timeout=float(node.get("timeout", 60.0)),
    )
    return MetricSpec(metric, scorer)


def load_config(path: str | Path) -> EvalConfig:
    """Parse a YAML evaluation config (grammar documented in the README)."""
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a mapping")

    images = []
    for node in doc.get("images", []):
        if not isinstance(node, dict) or "id" not in node or "path" not in node:
            raise ConfigError(f"bad image entry {node!r}")
        crop_rect = _parse_crop(node["crop"]) if "crop" in node else None
        img_path = Path(node["path"])
        if not img_path.is_absolute():
            img_path = path.parent / img_path
        images.append(ImageSpec(str(node["id"]), img_path, crop_rect))

    metric_specs = [_parse_metric(node) for node in doc.get("metrics", [])]
    rules = tuple(
        RoundingRule.from_name(name)
        for name in doc.get("rules", [r.display_name for r in DEFAULT_RULES])
    )
    out_dir = Path(doc.get("output_dir", "out"))
    if not out_dir.is_absolute():
        out_dir = path.parent / out_dir
    return EvalConfig(
        images=tuple(images),
        metrics=tuple(metric_specs),
        ratios=tuple(int(r) for r in doc.get("ratios", (2, 3, 4, 5))),
        rules=rules,
        tie_epsilon=float(doc.get("tie_epsilon", 0.0)),
        proportion=float(doc.get("proportion", 0.5)),
        z=float(doc.get("z", 1.96)),
        projection_populations=tuple(
            int(n) for n in doc.get("projection_populations", (800, 8000, 80000, 800000))
        ),
        output_dir=out_dir,
        jobs=int(doc.get("jobs", 1)),
    )


def divisible_crop(img: PixelBuffer, ratio: int) -> CropRect | None:
    """Top-left-anchored crop to the largest dimensions divisible by ratio.

    Returns None when the image is already divisible.
    """
    w = img.width - img.width % ratio
    h = img.height - img.height % ratio
    if w < ratio or h < ratio:
        raise ValueError(
            f"image {img.width}x{img.height} too small for ratio {ratio}"
        )
    if (w, h) == (img.width, img.height):
        return None
    return CropRect(left=1, top=1, width=w, height=h)


def prepare_case(
    img: PixelBuffer, ratio: int, crop_rect: CropRect | None = None
) -> tuple[PixelBuffer, PixelBuffer]:
    """Build the (reference, source) pair for one image at one ratio.

    The reference is the (optionally cropped) original; the source is its
    box-filtered downsample by the ratio. Dimensions must divide evenly.
    """
    reference = crop(img, crop_rect) if crop_rect is not None else img
    if reference.width % ratio or reference.height % ratio:
        suggested = divisible_crop(reference, ratio)
        raise ValueError(
            f"dimensions {reference.width}x{reference.height} not divisible by "
            f"ratio {ratio}; suggested crop: {suggested}"
        )
    return reference, downsample_box(reference, ratio)


@dataclass(frozen=True)
class CaseRecord:
    """One grid cell: the score of one rule on one (image, ratio, metric)."""

    image_id: str
    ratio: int
    metric: MetricId
    rule: RoundingRule
    score: float | None
    winner: bool = False
    error: str = ""


@dataclass
class GridResult:
    records: list[CaseRecord]
    tally: evalstat.OccurrenceTally
    projections: list[evalstat.MoEResult]
    notes: list[str] = field(default_factory=list)


def _score_cell(
    spec: MetricSpec,
    reference: PixelBuffer,
    upscaled: PixelBuffer,
    upscaled_path: Path,
) -> float:
    name = spec.metric.name
    if spec.scorer is not None:
        return score_external(spec.scorer, upscaled_path)
    if name == "MSE":
        return metrics.mse(reference, upscaled)
    if name == "SSIM":
        return metrics.ssim(reference, upscaled)
    raise ConfigError(f"metric {name!r} has no native implementation and no scorer")


def run_grid(config: EvalConfig) -> GridResult:
    """Evaluate the full grid and fold scores into winners, tally, projections.

    Deterministic: identical config, images, and external scorers yield
    identical results; scoring may run in parallel up to config.jobs.
    """
    notes: list[str] = []
    needs_files = any(s.scorer is not None for s in config.metrics)

    # (image_id, ratio) -> reference plus per-rule upscaled buffers
    prepared: dict[tuple[str, int], tuple[PixelBuffer, dict[RoundingRule, PixelBuffer]]] = {}
    with tempfile.TemporaryDirectory(prefix="nnround-") as tmp:
        tmp_dir = Path(tmp)
        for spec in config.images:
            try:
                img = load_pnm(spec.path.read_bytes())
            except OSError as exc:
                raise ConfigError(f"cannot read image {spec.path}: {exc}") from None
            for ratio in config.ratios:
                crop_rect = spec.crop_rect
                if crop_rect is None:
                    auto = divisible_crop(img, ratio)
                    if auto is not None:
                        crop_rect = auto
                        notes.append(
                            f"{spec.id} ratio {ratio}: auto-cropped to "
                            f"{auto.width}x{auto.height} (top-left anchored)"
                        )
                reference, source = prepare_case(img, ratio, crop_rect)
                upscaled = {
                    rule: resize_nn(source, reference.width, reference.height, rule)
                    for rule in config.rules
                }
                prepared[(spec.id, ratio)] = (reference, upscaled)
                if needs_files:
                    for rule, buf in upscaled.items():
                        out = tmp_dir / f"{spec.id}_r{ratio}_{rule.display_name}.pgm"
                        out.write_bytes(save_pnm(buf))

        tasks = []
        for spec in config.images:
            for ratio in config.ratios:
                for mspec in config.metrics:
                    for rule in config.rules:
                        tasks.append((spec.id, ratio, mspec, rule))

        def run_task(task):
            image_id, ratio, mspec, rule = task
            reference, upscaled = prepared[(image_id, ratio)]
            path = tmp_dir / f"{image_id}_r{ratio}_{rule.display_name}.pgm"
            try:
                score = _score_cell(mspec, reference, upscaled[rule], path)
                return task, score, ""
            except ExternalScorerError as exc:
                return task, None, str(exc)

        if config.jobs > 1:
            with concurrent.futures.ThreadPoolExecutor(config.jobs) as pool:
                outcomes = list(pool.map(run_task, tasks))
        else:
            outcomes = [run_task(t) for t in tasks]

    scores: dict[tuple[str, int, str], dict[RoundingRule, float]] = {}
    errors: dict[tuple[str, int, str, RoundingRule], str] = {}
    for (image_id, ratio, mspec, rule), score, err in outcomes:
        key = (image_id, ratio, mspec.metric.name)
        if score is None:
            errors[(image_id, ratio, mspec.metric.name, rule)] = err
            notes.append(
                f"excluded {image_id}/ratio {ratio}/{mspec.metric.name}/"
                f"{rule.display_name}: {err}"
            )
        else:
            scores.setdefault(key, {})[rule] = score

    records: list[CaseRecord] = []
    winner_sets = []
    for spec in config.images:
        for ratio in config.ratios:
            for mspec in config.metrics:
                key = (spec.id, ratio, mspec.metric.name)
                cell = scores.get(key, {})
                if len(cell) >= 2:
                    case = evalstat.ScoreCase(spec.id, ratio, mspec.metric, cell)
                    ws = evalstat.winners(case, config.tie_epsilon)
                    winner_sets.append(ws)
                else:
                    ws = frozenset()
                    if cell:
                        notes.append(
                            f"case {spec.id}/ratio {ratio}/{mspec.metric.name} "
                            "not rankable (fewer than two scored rules)"
                        )
                for rule in config.rules:
                    records.append(
                        CaseRecord(
                            image_id=spec.id,
                            ratio=ratio,
                            metric=mspec.metric,
                            rule=rule,
                            score=cell.get(rule),
                            winner=rule in ws,
                            error=errors.get((spec.id, ratio, mspec.metric.name, rule), ""),
                        )
                    )

    targeted = len(winner_sets)
    grid_tally = evalstat.tally(winner_sets, config.rules, targeted)
    projections = [
        evalstat.MoEResult(
            sample_size=targeted,
            population_size=pop,
            proportion=config.proportion,
            z=config.z,
            margin=evalstat.margin_of_error(targeted, pop, config.proportion, config.z)
            if targeted > 0
            else 0.0,
        )
        for pop in config.projection_populations
        if pop >= targeted
    ]
    return GridResult(records, grid_tally, projections, notes)


def _fmt_pct(fraction: float) -> str:
    return f"{fraction * 100:g}%"


def emit_reports(result: GridResult, config: EvalConfig) -> list[Path]:
    """Write winners.md, scores.csv, tally.csv, projection.csv, series_rescaled.csv."""
    if not result.records:
        raise ValueError("nothing to report: empty record set")
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    written = []

    # winners.md: per image, metric x ratio winner letters
    lines = ["# Winner tables", ""]
    by_case: dict[tuple[str, int, str], list[CaseRecord]] = {}
    for rec in result.records:
        by_case.setdefault((rec.image_id, rec.ratio, rec.metric.name), []).append(rec)
    metric_names = [m.metric.name for m in config.metrics]
    for spec in config.images:
        lines.append(f"## {spec.id}")
        lines.append("")
        header = "| metric | " + " | ".join(f"ratio = {r}" for r in config.ratios) + " |"
        lines.append(header)
        lines.append("|" + "---|" * (len(config.ratios) + 1))
        for name in metric_names:
            cells = []
            for ratio in config.ratios:
                recs = by_case.get((spec.id, ratio, name), [])
                ws = frozenset(r.rule for r in recs if r.winner)
                cells.append(format_winner_letters(ws) if ws else "-")
            lines.append(f"| {name} | " + " | ".join(cells) + " |")
        lines.append("")
    if result.notes:
        lines.append("## Notes")
        lines.append("")
        lines.extend(f"- {note}" for note in result.notes)
        lines.append("")
    winners_md = out / "winners.md"
    winners_md.write_text("\n".join(lines))
    written.append(winners_md)

    scores_csv = out / "scores.csv"
    rows = ["image,ratio,metric,rule,score,winner"]
    for rec in result.records:
        score = "" if rec.score is None else repr(rec.score)
        rows.append(
            f"{rec.image_id},{rec.ratio},{rec.metric.name},"
            f"{rec.rule.display_name},{score},{str(rec.winner).lower()}"
        )
    scores_csv.write_text("\n".join(rows) + "\n")
    written.append(scores_csv)

    tally_csv = out / "tally.csv"
    rows = ["rule,occurrences,percentage"]
    for rule in config.rules:
        achieved = result.tally.achieved[rule]
        targeted = result.tally.targeted
        pct = _fmt_pct(achieved / targeted) if targeted else "-"
        rows.append(f"{rule.display_name},{achieved}/{targeted},{pct}")
    tally_csv.write_text("\n".join(rows) + "\n")
    written.append(tally_csv)

    projection_csv = out / "projection.csv"
    header = "population,margin," + ",".join(
        f"lower_bound_{rule.display_name}" for rule in config.rules
    )
    rows = [header]
    for proj in result.projections:
        bounds = []
        for rule in config.rules:
            pct = (
                evalstat.achieved_percentage(result.tally, rule)
                if result.tally.targeted
                else 0.0
            )
            bounds.append(f"{evalstat.lower_bound(pct, proj.margin) * 100:.2f}%")
        rows.append(
            f"{proj.population_size},{proj.margin * 100:.2f}%," + ",".join(bounds)
        )
    projection_csv.write_text("\n".join(rows) + "\n")
    written.append(projection_csv)

    series_csv = out / "series_rescaled.csv"
    rows = ["image,metric,ratio,rule,score_rescaled"]
    for spec in config.images:
        for name in metric_names:
            group = [
                rec
                for rec in result.records
                if rec.image_id == spec.id
                and rec.metric.name == name
                and rec.score is not None
            ]
            if not group:
                continue
            lo, hi = metrics.PLOT_INTERVALS.get(name, (0.0, 1.0))
            rescaled = metrics.rescale_series([r.score for r in group], lo, hi)
            for rec, val in zip(group, rescaled):
                rows.append(
                    f"{rec.image_id},{name},{rec.ratio},"
                    f"{rec.rule.display_name},{val!r}"
                )
    series_csv.write_text("\n".join(rows) + "\n")
    written.append(series_csv)

    return written


def apply_overrides(
    config: EvalConfig,
    out: str | None = None,
    rules: list[str] | None = None,
    ratios: list[int] | None = None,
    tie_epsilon: float | None = None,
    jobs: int | None = None,
) -> EvalConfig:
    """Apply CLI flag overrides on top of a file-loaded config."""
    changes = {}
    if out is not None:
        changes["output_dir"] = Path(out)
    if rules is not None:
        changes["rules"] = tuple(RoundingRule.from_name(r) for r in rules)
    if ratios is not None:
        changes["ratios"] = tuple(ratios)
    if tie_epsilon is not None:
        changes["tie_epsilon"] = tie_epsilon
    if jobs is not None:
        changes["jobs"] = jobs
    return replace(config, **changes) if changes else config
