"""256-bin gray-level histograms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyHistogramError
from .image_core import GrayImage

LEVELS = 256


@dataclass(frozen=True, eq=False)
class Histogram:
    counts: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.counts)
        if c.shape != (LEVELS,):
            raise ValueError(f"histogram must have {LEVELS} bins, got shape {c.shape}")
        if np.any(c < 0):
            raise ValueError("histogram counts must be non-negative")
        c = c.astype(np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Histogram):
            return NotImplemented
        return bool(np.array_equal(self.counts, other.counts))

    __hash__ = None  # type: ignore[assignment]


def compute_histogram(img: GrayImage) -> Histogram:
    return Histogram(np.bincount(img.flat(), minlength=LEVELS))


def _require_mass(h: Histogram) -> None:
    if h.total == 0:
        raise EmptyHistogramError("histogram is empty (total 0)")


def normalize(h: Histogram) -> np.ndarray:
    _require_mass(h)
    return h.counts / h.total


def occupied_range(h: Histogram) -> tuple[int, int]:
    _require_mass(h)
    nz = np.flatnonzero(h.counts)
    return int(nz[0]), int(nz[-1])
