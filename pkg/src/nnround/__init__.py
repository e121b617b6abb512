"""nnround: nearest-neighbor upscaling under pluggable rounding rules,
with a quality-evaluation harness (winner tables, occurrence tallies,
margin-of-error projections)."""

from .raster import (
    CropRect,
    PixelBuffer,
    crop,
    downsample_box,
    load_pnm,
    save_pnm,
    to_luma,
)
from .rounding import ALL_RULES, DEFAULT_RULES, RoundingRule, round_value
from .nn_scale import IndexMap, ScalePair, build_index_map, map_coord, resize_nn
from .metrics import (
    MetricId,
    MetricKind,
    Polarity,
    SsimParams,
    mse,
    rescale_series,
    ssim,
)
from .extscore import ExternalScorer, ExternalScorerError, score_external
from .evalstat import (
    MoEResult,
    OccurrenceTally,
    ScoreCase,
    achieved_percentage,
    lower_bound,
    margin_of_error,
    tally,
    winners,
)
from .harness import (
    EvalConfig,
    GridResult,
    ImageSpec,
    MetricSpec,
    emit_reports,
    load_config,
    prepare_case,
    run_grid,
)

__version__ = "0.1.0"
