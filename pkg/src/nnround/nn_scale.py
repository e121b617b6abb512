"""Linear coordinate scaling, index maps, and nearest-neighbor resize."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .raster import PixelBuffer
from .rounding import RoundingRule, round_value


@dataclass(frozen=True)
class ScalePair:
    """Source/destination lengths of one axis.

    The scaling ratio dest_length/src_length is kept as the integer pair
    and never pre-divided, so coordinate mapping can multiply first and
    divide once.
    """

    src_length: int
    dest_length: int

    def __post_init__(self):
        if self.src_length < 1 or self.dest_length < 1:
            raise ValueError(f"lengths must be positive, got {self}")


def map_coord(dst_coord: int, pair: ScalePair) -> float:
    """Map a 1-based destination coordinate to a real source coordinate.

    Computed as (dst_coord * src_length) / dest_length with an exact
    integer product, avoiding double rounding.
    """
    if not 1 <= dst_coord <= pair.dest_length:
        raise ValueError(
            f"dst_coord {dst_coord} outside [1, {pair.dest_length}]"
        )
    return (dst_coord * pair.src_length) / pair.dest_length


@dataclass(frozen=True)
class IndexMap:
    """Per-destination-coordinate source index table for one axis.

    All coordinates are 1-based; src_indices are clamped into
    [1, src_length] with the clamped flag set where clamping fired.
    """

    src_length: int
    dest_length: int
    rule: RoundingRule
    raw_coords: np.ndarray = field(repr=False)
    src_indices: np.ndarray = field(repr=False)
    clamped: np.ndarray = field(repr=False)

    @property
    def dst_coords(self) -> np.ndarray:
        return np.arange(1, self.dest_length + 1)

    def to_csv(self) -> str:
        """Debug export: dst_coord,raw_coord,src_index,clamped."""
        out = io.StringIO()
        out.write("dst_coord,raw_coord,src_index,clamped\n")
        for d, raw, s, cl in zip(
            self.dst_coords, self.raw_coords, self.src_indices, self.clamped
        ):
            out.write(f"{d},{raw!r},{s},{str(bool(cl)).lower()}\n")
        return out.getvalue()


def build_index_map(pair: ScalePair, rule: RoundingRule) -> IndexMap:
    """Round each mapped coordinate per rule, then clamp into [1, src_length]."""
    raw = np.empty(pair.dest_length, dtype=np.float64)
    idx = np.empty(pair.dest_length, dtype=np.int64)
    for i in range(pair.dest_length):
        raw[i] = map_coord(i + 1, pair)
        idx[i] = round_value(raw[i], rule)
    clamped_idx = np.clip(idx, 1, pair.src_length)
    clamped = clamped_idx != idx
    raw.setflags(write=False)
    clamped_idx.setflags(write=False)
    clamped.setflags(write=False)
    return IndexMap(pair.src_length, pair.dest_length, rule, raw, clamped_idx, clamped)


def resize_nn(
    img: PixelBuffer, dest_width: int, dest_height: int, rule: RoundingRule
) -> PixelBuffer:
    """Separable nearest-neighbor resize: a pure gather, no sample arithmetic."""
    xmap = build_index_map(ScalePair(img.width, dest_width), rule)
    ymap = build_index_map(ScalePair(img.height, dest_height), rule)
    rows = ymap.src_indices - 1
    cols = xmap.src_indices - 1
    return PixelBuffer(img.data[rows[:, None], cols[None, :], :])
