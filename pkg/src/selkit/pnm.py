"""Netpbm raster ingestion: PGM (P2/P5) and PPM (P3/P6), 8-bit only.

Header tokens may be separated by any whitespace and interleaved with '#'
comments.  Binary rasters start one whitespace byte after the maxval token.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    MaxvalTooLargeError,
    MissingFileError,
    TruncatedPayloadError,
    UnsupportedFormatError,
)


@dataclass(frozen=True)
class RasterImage:
    """Row-major 8-bit raster; ``pixels`` has length width*height*channels,
    interleaved per pixel for RGB."""

    width: int
    height: int
    channels: int
    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.channels not in (1, 3):
            raise ValueError("channels must be 1 or 3")
        if pixels.shape != (self.width * self.height * self.channels,):
            raise ValueError("pixel buffer length must be width*height*channels")
        pixels = pixels.copy()
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    def channel(self, c: int) -> np.ndarray:
        return self.pixels[c :: self.channels]


def _tokens(data: bytes, limit: int | None = None):
    """Whitespace-separated tokens with '#'-to-newline comments stripped.

    Yields (token, end_offset) so binary readers can locate the payload.
    """
    i = 0
    n = len(data)
    count = 0
    while i < n and (limit is None or count < limit):
        c = data[i : i + 1]
        if c.isspace():
            i += 1
            continue
        if c == b"#":
            nl = data.find(b"\n", i)
            i = n if nl < 0 else nl + 1
            continue
        j = i
        while j < n and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
            j += 1
        yield data[i:j], j
        count += 1
        i = j


def _int_token(tok: bytes, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise UnsupportedFormatError(f"bad {what} token {tok!r}") from None


def read_pnm(path) -> RasterImage:
    """Decode a PGM/PPM file; ASCII and binary variants of the same pixels
    decode identically."""
    p = Path(path)
    if not p.is_file():
        raise MissingFileError(f"no such file: {p}")
    data = p.read_bytes()
    header = []
    payload_start = len(data)
    for tok, end in _tokens(data, limit=4):
        header.append(tok)
        payload_start = end
    if len(header) < 4:
        raise UnsupportedFormatError("incomplete header")
    magic = header[0]
    if magic not in (b"P2", b"P3", b"P5", b"P6"):
        raise UnsupportedFormatError(f"unsupported magic {magic!r}")
    width = _int_token(header[1], "width")
    height = _int_token(header[2], "height")
    maxval = _int_token(header[3], "maxval")
    if width < 1 or height < 1:
        raise UnsupportedFormatError("dimensions must be positive")
    if maxval > 255:
        raise MaxvalTooLargeError(f"maxval {maxval} exceeds 8-bit range")
    if maxval < 1:
        raise UnsupportedFormatError("maxval must be at least 1")
    channels = 3 if magic in (b"P3", b"P6") else 1
    need = width * height * channels

    if magic in (b"P5", b"P6"):
        raster = data[payload_start + 1 : payload_start + 1 + need]
        if len(raster) < need:
            raise TruncatedPayloadError(f"need {need} raster bytes, found {len(raster)}")
        pixels = np.frombuffer(raster, dtype=np.uint8)
        if pixels.max(initial=0) > maxval:
            raise UnsupportedFormatError("sample exceeds declared maxval")
        return RasterImage(width, height, channels, pixels)

    values = []
    for tok, _ in _tokens(data[payload_start:]):
        v = _int_token(tok, "sample")
        if v < 0 or v > maxval:
            raise UnsupportedFormatError(f"sample {v} outside [0, {maxval}]")
        values.append(v)
        if len(values) == need:
            break
    if len(values) < need:
        raise TruncatedPayloadError(f"need {need} samples, found {len(values)}")
    return RasterImage(width, height, channels, np.array(values, dtype=np.uint8))


def write_pnm(img: RasterImage, path) -> None:
    """Write the binary variant (P5 for grayscale, P6 for RGB) with
    maxval 255; re-reading then re-writing is byte-exact."""
    magic = b"P5" if img.channels == 1 else b"P6"
    header = magic + b"\n" + f"{img.width} {img.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.pixels.tobytes())
