"""Synthetic natural-like grayscale covers for tests, calibration and demos.

Each cover is white noise smoothed with a periodic Gaussian kernel,
stretched over a contiguous gray range and sprinkled with mild sensor
noise.  The result has many gray levels, no flat areas and a histogram
without gaps, which is what a good steganographic cover looks like.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .image_core import GrayImage


def smooth_field(height: int, width: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """White noise blurred by a Gaussian of std ``sigma`` pixels (wrap-around edges)."""
    noise = rng.standard_normal((height, width))
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.rfftfreq(width)[None, :]
    kernel = np.exp(-2.0 * (np.pi * sigma) ** 2 * (fy**2 + fx**2))
    return np.fft.irfft2(np.fft.rfft2(noise) * kernel, s=(height, width))


def natural_cover(
    height: int = 128,
    width: int = 128,
    seed: Optional[int] = None,
    low: int = 100,
    contrast: int = 32,
    sigma: float = 12.0,
    noise: float = 0.5,
) -> GrayImage:
    """A smooth cover occupying roughly ``low .. low + contrast``."""
    if not 0 <= low or not 1 <= contrast or low + contrast > 255:
        raise ValueError(f"gray range {low}..{low + contrast} does not fit in 0..255")
    rng = np.random.default_rng(seed)
    f = smooth_field(height, width, sigma, rng)
    f = (f - f.min()) / (f.max() - f.min())
    img = low + f * contrast + rng.normal(0.0, noise, f.shape)
    return GrayImage.from_array(np.clip(np.rint(img), 0, 255).astype(np.uint8))


def random_message(n_bytes: int, seed: Optional[int] = None) -> bytes:
    return np.random.default_rng(seed).integers(0, 256, n_bytes, dtype=np.uint8).tobytes()


def synthetic_corpus(
    count: int = 20,
    height: int = 128,
    width: int = 128,
    seed: int = 0,
) -> list[GrayImage]:
    """``count`` covers with varied smoothness, contrast and brightness."""
    rng = np.random.default_rng(seed)
    covers = []
    for _ in range(count):
        sigma = float(rng.uniform(8.0, 16.0))
        contrast = int(rng.integers(16, 41))
        low = int(rng.integers(10, 245 - contrast))
        covers.append(
            natural_cover(
                height,
                width,
                seed=int(rng.integers(0, 2**32)),
                low=low,
                contrast=contrast,
                sigma=sigma,
            )
        )
    return covers
