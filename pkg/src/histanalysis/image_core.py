"""Grayscale rasters, binary PGM I/O, bit-plane slicing and PSNR."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DimensionError, PgmParseError

#: Returned by :func:`psnr` when both images are pixel-identical (MSE == 0).
IDENTICAL = "identical"

N_PLANES = 8
PEAK = 255


@dataclass(frozen=True, eq=False)
class GrayImage:
    """An 8-bit grayscale raster stored row-major.

    ``pixels`` is kept as a read-only ``uint8`` array of shape
    ``(height, width)``; construct through :meth:`from_array` or
    :meth:`from_list` to get validation.
    """

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise DimensionError(f"image dimensions must be >= 1, got {self.width}x{self.height}")
        arr = np.asarray(self.pixels)
        if arr.shape != (self.height, self.width):
            raise DimensionError(
                f"pixel array shape {arr.shape} does not match {self.height}x{self.width}"
            )
        if arr.dtype != np.uint8:
            raise TypeError(f"pixels must be uint8, got {arr.dtype}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def from_array(cls, arr) -> "GrayImage":
        a = np.asarray(arr)
        if a.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got {a.ndim}-D")
        if a.dtype != np.uint8:
            if np.issubdtype(a.dtype, np.floating) and not np.all(a == np.round(a)):
                raise ValueError("pixel values must be integers")
            if a.size and (a.min() < 0 or a.max() > PEAK):
                raise ValueError("pixel values must lie in [0, 255]")
            a = a.astype(np.uint8)
        return cls(width=a.shape[1], height=a.shape[0], pixels=a)

    @classmethod
    def from_list(cls, width: int, height: int, values: Sequence[int]) -> "GrayImage":
        if len(values) != width * height:
            raise DimensionError(f"expected {width * height} pixels, got {len(values)}")
        return cls.from_array(np.asarray(values, dtype=np.int64).reshape(height, width))

    @property
    def size(self) -> int:
        return self.width * self.height

    def flat(self) -> np.ndarray:
        return self.pixels.reshape(-1)

    def tolist(self) -> list[int]:
        return self.flat().tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and bool(np.array_equal(self.pixels, other.pixels))
        )

    def __hash__(self) -> int:
        return hash((self.width, self.height, self.pixels.tobytes()))

    def __repr__(self) -> str:
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True, eq=False)
class BitPlane:
    width: int
    height: int
    plane_index: int
    bits: np.ndarray

    def __post_init__(self) -> None:
        if not 0 <= self.plane_index < N_PLANES:
            raise ValueError(f"plane_index must be in [0, 7], got {self.plane_index}")
        arr = np.asarray(self.bits, dtype=np.uint8)
        if arr.shape != (self.height, self.width):
            raise DimensionError(
                f"bit array shape {arr.shape} does not match {self.height}x{self.width}"
            )
        if arr.size and arr.max() > 1:
            raise ValueError("bit-plane entries must be 0 or 1")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitPlane):
            return NotImplemented
        return (
            self.plane_index == other.plane_index
            and self.bits.shape == other.bits.shape
            and bool(np.array_equal(self.bits, other.bits))
        )

    __hash__ = None  # type: ignore[assignment]

    def as_image(self) -> GrayImage:
        """Render the plane as a 0/255 image for viewing."""
        return GrayImage.from_array(self.bits * np.uint8(PEAK))


# --- PGM --------------------------------------------------------------------

_WHITESPACE = b" \t\n\r\v\f"


def _next_token(data: bytes, pos: int, field: str) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c in (b"#",):
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c and c in _WHITESPACE:
            pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos : pos + 1] not in _WHITESPACE and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise PgmParseError(f"missing {field} (header ends at byte offset {start})", field=field, offset=start)
    return data[start:pos], pos


def _header_int(data: bytes, pos: int, field: str) -> tuple[int, int]:
    tok, end = _next_token(data, pos, field)
    if not tok.isdigit():
        raise PgmParseError(
            f"{field} is not a decimal integer: {tok!r} at byte offset {end - len(tok)}",
            field=field,
            offset=end - len(tok),
        )
    return int(tok), end


def load_pgm(data: bytes) -> GrayImage:
    """Parse a binary (P5) PGM with maxval 255."""
    if not isinstance(data, (bytes, bytearray, memoryview)):
        raise TypeError("load_pgm expects a bytes-like object")
    data = bytes(data)
    if data[:2] != b"P5":
        raise PgmParseError(f"bad magic {data[:2]!r}, expected b'P5'", field="magic", offset=0)
    if len(data) > 2 and data[2:3] not in _WHITESPACE and data[2:3] != b"#":
        raise PgmParseError("magic must be followed by whitespace", field="magic", offset=2)
    width, pos = _header_int(data, 2, "width")
    height, pos = _header_int(data, pos, "height")
    maxval, pos = _header_int(data, pos, "maxval")
    if width == 0:
        raise PgmParseError("width must be >= 1", field="width")
    if height == 0:
        raise PgmParseError("height must be >= 1", field="height")
    if maxval != PEAK:
        raise PgmParseError(f"unsupported maxval {maxval} (only 255 is supported)", field="maxval")
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise PgmParseError(
            f"expected a single whitespace byte after maxval at byte offset {pos}",
            field="maxval",
            offset=pos,
        )
    pos += 1
    need = width * height
    have = len(data) - pos
    if have < need:
        raise PgmParseError(
            f"truncated pixel data: need {need} bytes from offset {pos}, got {have}",
            field="pixels",
            offset=len(data),
        )
    pixels = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos).reshape(height, width)
    return GrayImage(width=width, height=height, pixels=pixels)


def save_pgm(img: GrayImage) -> bytes:
    if not isinstance(img, GrayImage):
        raise TypeError(f"save_pgm expects a GrayImage, got {type(img).__name__}")
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


# --- bit-planes -------------------------------------------------------------

def slice_bitplane(img: GrayImage, k: int) -> BitPlane:
    if not 0 <= k < N_PLANES:
        raise ValueError(f"plane index must be in [0, 7], got {k}")
    bits = (img.pixels >> np.uint8(k)) & np.uint8(1)
    return BitPlane(width=img.width, height=img.height, plane_index=k, bits=bits)


def compose_bitplanes(planes: Sequence[BitPlane]) -> GrayImage:
    """Rebuild an image from its eight planes (any order, indices 0..7 exactly once)."""
    indices = sorted(p.plane_index for p in planes)
    if indices != list(range(N_PLANES)):
        raise ValueError(f"need plane indices 0..7 exactly once, got {indices}")
    shapes = {(p.width, p.height) for p in planes}
    if len(shapes) != 1:
        raise DimensionError(f"bit-planes disagree on dimensions: {sorted(shapes)}")
    width, height = shapes.pop()
    acc = np.zeros((height, width), dtype=np.uint8)
    for p in planes:
        acc |= p.bits << np.uint8(p.plane_index)
    return GrayImage(width=width, height=height, pixels=acc)


# --- quality ----------------------------------------------------------------

def mse(a: GrayImage, b: GrayImage) -> float:
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionError(
            f"image dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    d = a.pixels.astype(np.int64) - b.pixels.astype(np.int64)
    return float(np.mean(d * d))


def psnr(a: GrayImage, b: GrayImage) -> Union[float, str]:
    """Peak signal-to-noise ratio in dB, or :data:`IDENTICAL` when MSE is zero."""
    err = mse(a, b)
    if err == 0:
        return IDENTICAL
    return 10.0 * math.log10(PEAK * PEAK / err)
