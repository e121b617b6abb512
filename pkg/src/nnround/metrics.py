"""Full-reference quality metrics (MSE, SSIM), metric registry, series rescaling."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import convolve2d

from .raster import PixelBuffer, to_luma


class Polarity(enum.Enum):
    LOWER_BETTER = "lower"
    HIGHER_BETTER = "higher"


class MetricKind(enum.Enum):
    FULL_REFERENCE = "full-reference"
    NO_REFERENCE = "no-reference"


@dataclass(frozen=True)
class MetricId:
    name: str
    polarity: Polarity
    kind: MetricKind


MSE_METRIC = MetricId("MSE", Polarity.LOWER_BETTER, MetricKind.FULL_REFERENCE)
SSIM_METRIC = MetricId("SSIM", Polarity.HIGHER_BETTER, MetricKind.FULL_REFERENCE)
BRISQUE_METRIC = MetricId("BRISQUE", Polarity.LOWER_BETTER, MetricKind.NO_REFERENCE)
NIQE_METRIC = MetricId("NIQE", Polarity.LOWER_BETTER, MetricKind.NO_REFERENCE)

KNOWN_METRICS = {
    m.name: m for m in (MSE_METRIC, SSIM_METRIC, BRISQUE_METRIC, NIQE_METRIC)
}

# Plot intervals the harness rescales each metric's series to.
PLOT_INTERVALS = {
    "SSIM": (0.6, 1.4),
    "NIQE": (2.5, 3.0),
    "BRISQUE": (4.0, 4.6),
    "MSE": (5.4, 6.01),
}


def metric_by_name(
    name: str,
    polarity: Polarity = Polarity.LOWER_BETTER,
    kind: MetricKind = MetricKind.NO_REFERENCE,
) -> MetricId:
    """Look up a built-in metric or describe an external one."""
    known = KNOWN_METRICS.get(name.upper())
    if known is not None:
        return known
    return MetricId(name, polarity, kind)


@dataclass(frozen=True)
class SsimParams:
    """Canonical SSIM constants: K1/K2, 8-bit dynamic range, 11x11 Gaussian."""

    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0
    window_size: int = 11
    sigma: float = 1.5

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2


def _luma_f64(img: PixelBuffer) -> np.ndarray:
    return to_luma(img).data[:, :, 0].astype(np.float64)


def _check_same_shape(a: PixelBuffer, b: PixelBuffer):
    if (a.width, a.height) != (b.width, b.height):
        raise ValueError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def mse(a: PixelBuffer, b: PixelBuffer) -> float:
    """Mean squared intensity difference; RGB inputs are collapsed to luma."""
    _check_same_shape(a, b)
    da = _luma_f64(a)
    db = _luma_f64(b)
    return float(np.mean((da - db) ** 2))


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    """1-D Gaussian taps centered on the window, normalized to sum 1."""
    offsets = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(offsets**2) / (2.0 * sigma**2))
    return g / g.sum()


def _filter_valid(img: np.ndarray, taps: np.ndarray) -> np.ndarray:
    # separable Gaussian, valid region only (no border padding)
    out = convolve2d(img, taps[:, None], mode="valid")
    return convolve2d(out, taps[None, :], mode="valid")


def ssim(a: PixelBuffer, b: PixelBuffer, params: SsimParams | None = None) -> float:
    """Mean structural similarity over Gaussian-weighted local windows.

    The local map is restricted to the valid convolution region; no
    padding is applied at the borders.
    """
    params = params or SsimParams()
    _check_same_shape(a, b)
    if a.width < params.window_size or a.height < params.window_size:
        raise ValueError(
            f"image {a.width}x{a.height} smaller than "
            f"{params.window_size}x{params.window_size} window"
        )
    x = _luma_f64(a)
    y = _luma_f64(b)
    taps = gaussian_window(params.window_size, params.sigma)

    mu_x = _filter_valid(x, taps)
    mu_y = _filter_valid(y, taps)
    var_x = _filter_valid(x * x, taps) - mu_x**2
    var_y = _filter_valid(y * y, taps) - mu_y**2
    cov = _filter_valid(x * y, taps) - mu_x * mu_y

    c1, c2 = params.c1, params.c2
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def rescale_series(values: Sequence[float], lo: float, hi: float) -> list[float]:
    """Affine map sending min(values) -> lo and max(values) -> hi.

    A constant series maps every element to the interval midpoint.
    Strictly monotone, so orderings and argbest positions are preserved.
    """
    if len(values) == 0:
        raise ValueError("cannot rescale an empty series")
    if hi <= lo:
        raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
    vmin = min(values)
    vmax = max(values)
    if vmin == vmax:
        mid = (lo + hi) / 2.0
        return [mid] * len(values)
    scale = (hi - lo) / (vmax - vmin)
    return [lo + (v - vmin) * scale for v in values]
