"""8-bit raster images: container, binary PNM codec, and corpus-prep geometry."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class PnmError(ValueError):
    """Base class for PNM codec failures."""


class MalformedHeaderError(PnmError):
    pass


class UnsupportedMaxvalError(PnmError):
    pass


class TruncatedPayloadError(PnmError):
    pass


class PixelBuffer:
    """Immutable 8-bit image, 1 (gray) or 3 (RGB) channels, row-major.

    Wraps a read-only uint8 array of shape (height, width, channels).
    """

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        arr = np.asarray(data)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or arr.shape[2] not in (1, 3):
            raise ValueError(f"expected (H, W, 1|3) array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError(f"expected integer samples, got {arr.dtype}")
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("sample values must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("width and height must be positive")
        arr = np.ascontiguousarray(arr).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("PixelBuffer is immutable")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PixelBuffer):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(
            np.array_equal(self.data, other.data)
        )

    def __hash__(self):
        return hash((self.data.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"PixelBuffer({self.width}x{self.height}, channels={self.channels})"


@dataclass(frozen=True)
class CropRect:
    """1-based crop window; must lie fully inside the source buffer."""

    left: int
    top: int
    width: int
    height: int

    def __post_init__(self):
        if self.left < 1 or self.top < 1 or self.width < 1 or self.height < 1:
            raise ValueError(f"invalid crop rectangle {self}")


_WHITESPACE = b" \t\r\n\v\f"


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Return the next header token and the offset just past it.

    Skips whitespace and '#' comments (to end of line).
    """
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c in (b"#",):
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c in _WHITESPACE:
            pos += 1
        else:
            break
    if pos >= n:
        raise MalformedHeaderError("unexpected end of header")
    start = pos
    while pos < n and data[pos : pos + 1] not in _WHITESPACE:
        pos += 1
    return data[start:pos], pos


def load_pnm(data: bytes) -> PixelBuffer:
    """Decode a binary PGM (P5) or PPM (P6) with maxval 255.

    Sample values are copied verbatim; no color transform is applied.
    """
    magic, pos = _next_token(data, 0)
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise MalformedHeaderError(f"unsupported magic {magic!r}; expected P5 or P6")

    fields = []
    for _ in range(3):
        tok, pos = _next_token(data, pos)
        if not tok.isdigit():
            raise MalformedHeaderError(f"non-numeric header field {tok!r}")
        fields.append(int(tok))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxvalError(f"maxval {maxval} unsupported; only 255")

    # exactly one whitespace byte separates the header from the payload
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise MalformedHeaderError("missing whitespace after maxval")
    pos += 1

    expected = width * height * channels
    payload = data[pos : pos + expected]
    if len(payload) < expected:
        raise TruncatedPayloadError(
            f"payload has {len(payload)} bytes, expected {expected}"
        )
    arr = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    return PixelBuffer(arr)


def save_pnm(img: PixelBuffer) -> bytes:
    """Encode to binary PGM/PPM; load_pnm(save_pnm(img)) == img, bit-exact."""
    magic = b"P5" if img.channels == 1 else b"P6"
    header = magic + b"\n%d %d\n255\n" % (img.width, img.height)
    return header + img.data.tobytes()


def crop(img: PixelBuffer, rect: CropRect) -> PixelBuffer:
    """Copy the samples inside a 1-based rectangle."""
    if rect.left + rect.width - 1 > img.width or rect.top + rect.height - 1 > img.height:
        raise ValueError(
            f"crop {rect} exceeds image bounds {img.width}x{img.height}"
        )
    r0, c0 = rect.top - 1, rect.left - 1
    return PixelBuffer(img.data[r0 : r0 + rect.height, c0 : c0 + rect.width, :])


def downsample_box(img: PixelBuffer, factor: int) -> PixelBuffer:
    """Shrink by an integer factor: each output sample is the block mean.

    Means are quantized to 8 bits with round-half-away-from-zero, computed
    in exact integer arithmetic.
    """
    if factor < 1:
        raise ValueError(f"factor must be positive, got {factor}")
    if img.width % factor or img.height % factor:
        raise ValueError(
            f"dimensions {img.width}x{img.height} not divisible by {factor}"
        )
    if factor == 1:
        return img
    h, w, c = img.height // factor, img.width // factor, img.channels
    blocks = img.data.reshape(h, factor, w, factor, c).astype(np.int64)
    sums = blocks.sum(axis=(1, 3))
    f2 = factor * factor
    # floor(sum/f2 + 1/2) without leaving the integers
    rounded = (2 * sums + f2) // (2 * f2)
    return PixelBuffer(rounded.astype(np.uint8))


def to_luma(img: PixelBuffer) -> PixelBuffer:
    """Collapse RGB to grayscale with Rec.601 weights; gray passes through.

    Weighted sums are quantized with round-half-away-from-zero, computed
    in exact integer arithmetic (weights scaled by 1000).
    """
    if img.channels == 1:
        return img
    rgb = img.data.astype(np.int64)
    num = 299 * rgb[:, :, 0] + 587 * rgb[:, :, 1] + 114 * rgb[:, :, 2]
    luma = (2 * num + 1000) // 2000
    return PixelBuffer(luma.astype(np.uint8))
