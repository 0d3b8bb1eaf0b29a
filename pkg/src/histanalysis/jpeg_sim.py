"""A lossy baseline-JPEG round trip without the entropy coder.

Per 8x8 block: level shift by -128, orthonormal 2-D DCT-II, divide by the
quality-scaled luminance table and round, multiply back, inverse DCT, undo
the shift, round and clamp.  Rounding is half-away-from-zero throughout.
"""

from __future__ import annotations

import math

import numpy as np

from .image_core import GrayImage

N = 8
LEVEL_SHIFT = 128.0

# Standard luminance quantization table (quality 50), row-major by (row, col).
Q50 = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)
Q50.setflags(write=False)


def _alpha(k: int) -> float:
    return math.sqrt(1.0 / N) if k == 0 else math.sqrt(2.0 / N)


def _basis() -> np.ndarray:
    # B[u, x] = alpha(u) * cos((2x + 1) u pi / 2N)
    b = np.empty((N, N))
    for u in range(N):
        for x in range(N):
            b[u, x] = _alpha(u) * math.cos((2 * x + 1) * u * math.pi / (2 * N))
    b.setflags(write=False)
    return b


DCT_BASIS = _basis()


def round_half_away(x):
    """Round to nearest integer, ties away from zero (np.round ties to even)."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def _as_block(block, name: str) -> np.ndarray:
    b = np.asarray(block, dtype=np.float64)
    if b.shape != (N, N):
        raise ValueError(f"{name} must be 8x8, got shape {b.shape}")
    return b


def forward_dct(block) -> np.ndarray:
    """Level-shifted 2-D DCT of an 8x8 block of intensities; ``[0, 0]`` is DC."""
    f = _as_block(block, "block") - LEVEL_SHIFT
    return DCT_BASIS @ f @ DCT_BASIS.T


def inverse_dct(coeffs) -> np.ndarray:
    """Inverse 2-D DCT plus the level shift; no rounding or clamping."""
    c = _as_block(coeffs, "coefficient block")
    return DCT_BASIS.T @ c @ DCT_BASIS + LEVEL_SHIFT


def _check_table(q) -> np.ndarray:
    t = np.asarray(q)
    if t.shape != (N, N):
        raise ValueError(f"quantization table must be 8x8, got shape {t.shape}")
    if not np.all(t == np.round(t)) or np.any(t < 1):
        raise ValueError("quantization table entries must be integers >= 1")
    return t.astype(np.int64)


def quantize(coeffs, q) -> np.ndarray:
    # Works on a single 8x8 block or any (..., 8, 8) stack of blocks.
    return round_half_away(np.asarray(coeffs, dtype=np.float64) / _check_table(q)).astype(np.int64)


def dequantize(qb, q) -> np.ndarray:
    return (np.asarray(qb, dtype=np.int64) * _check_table(q)).astype(np.float64)


def scale_quant_table(base, quality: int) -> np.ndarray:
    """libjpeg-style quality scaling of ``base`` (taken to be the quality-50 table)."""
    if not isinstance(quality, (int, np.integer)) or not 1 <= quality <= 100:
        raise ValueError(f"quality must be an integer in [1, 100], got {quality!r}")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    table = (_check_table(base) * scale + 50) // 100
    return np.maximum(table, 1)


def _zigzag_order() -> list[tuple[int, int]]:
    order = []
    for s in range(2 * N - 1):
        rows = range(max(0, s - N + 1), min(s, N - 1) + 1)
        # even anti-diagonals run bottom-left to top-right
        rows = reversed(rows) if s % 2 == 0 else rows
        order.extend((r, s - r) for r in rows)
    return order


ZIGZAG = tuple(_zigzag_order())


def zigzag_scan(qb) -> list:
    b = np.asarray(qb)
    if b.shape != (N, N):
        raise ValueError(f"block must be 8x8, got shape {b.shape}")
    return [b[r, c].item() for r, c in ZIGZAG]


def inverse_zigzag(seq) -> np.ndarray:
    if len(seq) != N * N:
        raise ValueError(f"expected 64 values, got {len(seq)}")
    out = np.zeros((N, N), dtype=np.asarray(seq).dtype)
    for v, (r, c) in zip(seq, ZIGZAG):
        out[r, c] = v
    return out


def jpeg_roundtrip(img: GrayImage, quality: int) -> GrayImage:
    """Compress and decompress ``img`` through the lossy core of baseline JPEG.

    Dimensions that are not multiples of 8 are edge-padded, processed and
    cropped back.
    """
    table = scale_quant_table(Q50, quality)
    h, w = img.height, img.width
    ph, pw = -h % N, -w % N
    x = img.pixels.astype(np.float64)
    if ph or pw:
        x = np.pad(x, ((0, ph), (0, pw)), mode="edge")
    H, W = x.shape
    blocks = x.reshape(H // N, N, W // N, N).transpose(0, 2, 1, 3) - LEVEL_SHIFT
    coeffs = DCT_BASIS @ blocks @ DCT_BASIS.T
    restored = dequantize(quantize(coeffs, table), table)
    y = DCT_BASIS.T @ restored @ DCT_BASIS + LEVEL_SHIFT
    y = y.transpose(0, 2, 1, 3).reshape(H, W)[:h, :w]
    y = np.clip(round_half_away(y), 0, 255).astype(np.uint8)
    return GrayImage(width=w, height=h, pixels=y)
