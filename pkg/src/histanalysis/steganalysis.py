"""Histogram scores for spotting bit-plane replacement, plus a threshold detector.

Four scores are computed from the 256-bin histogram:

``chi_square``
    Pairs-of-values statistic over (2k, 2k+1).  Replacing plane 0 with
    random bits equalizes each pair, so stego images score *low*.
``comb``
    Fraction of interior levels that are strict local extrema, i.e. an
    alternating peak/valley pattern.  Stego images (especially after lossy
    recompression) score *high*.
``discontinuity``
    Total variation of the normalized histogram.  Higher is spikier.
``empty_bin_ratio``
    Fraction of levels strictly inside the occupied range that are empty.
    Higher means the histogram is broken into separate zones.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import DegenerateInputError, EmptyHistogramError
from .histogram import Histogram, compute_histogram, normalize, occupied_range
from .image_core import GrayImage

SCORE_NAMES = ("chi_square", "comb", "discontinuity", "empty_bin_ratio")

# "below": stego when score < threshold; "above": stego when score > threshold.
DIRECTIONS = {
    "chi_square": "below",
    "comb": "above",
    "discontinuity": "above",
    "empty_bin_ratio": "above",
}

RULES = ("any", "majority", "weighted")

CLEAN = "clean"
SUSPECTED = "suspected-stego"
DEGENERATE = "degenerate-input"

MIN_PIXELS = 1024
MIN_LEVELS = 3


# --- scores -----------------------------------------------------------------

def pov_chi_square(h: Histogram) -> tuple[float, int]:
    if h.total == 0:
        raise EmptyHistogramError("histogram is empty (total 0)")
    c = h.counts.astype(np.float64)
    even, odd = c[0::2], c[1::2]
    expected = (even + odd) / 2.0
    used = expected > 0
    e = expected[used]
    stat = float(np.sum(((even[used] - e) ** 2 + (odd[used] - e) ** 2) / e))
    return stat, int(used.sum())


def comb_score(h: Histogram) -> float:
    lo, hi = occupied_range(h)
    if hi - lo + 1 < 3:
        raise DegenerateInputError(f"occupied range {lo}..{hi} spans fewer than 3 levels")
    d = np.sign(np.diff(h.counts[lo : hi + 1]))
    left, right = d[:-1], d[1:]
    flips = (left != 0) & (right != 0) & (left != right)
    return float(flips.mean())


def discontinuity_score(h: Histogram) -> float:
    return float(np.abs(np.diff(normalize(h))).sum())


def empty_bin_ratio(h: Histogram) -> float:
    lo, hi = occupied_range(h)
    if hi == lo:
        raise DegenerateInputError(f"occupied range is the single level {lo}")
    inner = h.counts[lo + 1 : hi]
    if inner.size == 0:
        return 0.0
    return float(np.count_nonzero(inner == 0) / inner.size)


@dataclass(frozen=True)
class ScoreVector:
    chi_square: float
    chi_square_dof: int
    comb: Optional[float]
    discontinuity: float
    empty_bin_ratio: Optional[float]

    def get(self, name: str) -> Optional[float]:
        if name not in SCORE_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def to_dict(self) -> dict:
        return asdict(self)


def score_histogram(h: Histogram) -> ScoreVector:
    """All four scores; ``comb``/``empty_bin_ratio`` are None when too few levels are occupied."""
    chi, dof = pov_chi_square(h)
    lo, hi = occupied_range(h)
    span = hi - lo + 1
    return ScoreVector(
        chi_square=chi,
        chi_square_dof=dof,
        comb=comb_score(h) if span >= 3 else None,
        discontinuity=discontinuity_score(h),
        empty_bin_ratio=empty_bin_ratio(h) if span >= 2 else None,
    )


def score_image(img: GrayImage) -> ScoreVector:
    return score_histogram(compute_histogram(img))


def is_degenerate(img: GrayImage, h: Optional[Histogram] = None) -> bool:
    if img.size < MIN_PIXELS:
        return True
    h = h if h is not None else compute_histogram(img)
    return int(np.count_nonzero(h.counts)) < MIN_LEVELS


# --- thresholds and detection -----------------------------------------------

@dataclass(frozen=True)
class Thresholds:
    """Per-score decision thresholds; a ``None`` value disables that score."""

    values: Mapping[str, Optional[float]]
    rule: str = "any"
    weights: Mapping[str, float] = field(default_factory=lambda: {n: 1.0 for n in SCORE_NAMES})

    def __post_init__(self) -> None:
        if self.rule not in RULES:
            raise ValueError(f"unknown combination rule {self.rule!r}; expected one of {RULES}")
        unknown = set(self.values) - set(SCORE_NAMES)
        if unknown:
            raise ValueError(f"unknown score names: {sorted(unknown)}")
        vals = {n: self.values.get(n) for n in SCORE_NAMES}
        for name, v in vals.items():
            if v is not None and not math.isfinite(v):
                raise ValueError(f"threshold for {name} must be finite, got {v}")
        weights = {n: float(self.weights.get(n, 1.0)) for n in SCORE_NAMES}
        if any(w < 0 or not math.isfinite(w) for w in weights.values()):
            raise ValueError("weights must be finite and non-negative")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "weights", weights)

    def enabled(self) -> list[str]:
        return [n for n in SCORE_NAMES if self.values[n] is not None]

    def to_dict(self) -> dict:
        return {"rule": self.rule, "values": dict(self.values), "weights": dict(self.weights)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Thresholds":
        # accept a full calibration document as well as a bare thresholds object
        if "thresholds" in d:
            d = d["thresholds"]
        try:
            values = d["values"]
        except (KeyError, TypeError):
            raise ValueError("thresholds document has no 'values' object") from None
        return cls(
            values={k: (None if v is None else float(v)) for k, v in values.items()},
            rule=d.get("rule", "any"),
            weights=d.get("weights") or {n: 1.0 for n in SCORE_NAMES},
        )


def triggers(name: str, score: Optional[float], threshold: Optional[float]) -> bool:
    if score is None or threshold is None:
        return False
    if DIRECTIONS[name] == "below":
        return score < threshold
    return score > threshold


def combine(triggered: Sequence[str], th: Thresholds, available: Iterable[str]) -> bool:
    voters = [n for n in available if th.values[n] is not None]
    if not voters:
        return False
    if th.rule == "any":
        return bool(triggered)
    if th.rule == "majority":
        return 2 * len(triggered) > len(voters)
    total = sum(th.weights[n] for n in voters)
    fired = sum(th.weights[n] for n in triggered)
    return total > 0 and 2 * fired > total


@dataclass(frozen=True)
class DetectionReport:
    scores: ScoreVector
    verdict: str
    triggered: tuple[str, ...]
    thresholds: Thresholds

    def to_dict(self) -> dict:
        return {
            "scores": self.scores.to_dict(),
            "verdict": self.verdict,
            "triggered": list(self.triggered),
            "thresholds": self.thresholds.to_dict(),
        }


def detect(img: GrayImage, th: Thresholds) -> DetectionReport:
    h = compute_histogram(img)
    scores = score_histogram(h)
    available = [n for n in SCORE_NAMES if scores.get(n) is not None]
    triggered = tuple(n for n in available if triggers(n, scores.get(n), th.values[n]))
    if is_degenerate(img, h):
        return DetectionReport(scores, DEGENERATE, triggered, th)
    verdict = SUSPECTED if combine(triggered, th, available) else CLEAN
    return DetectionReport(scores, verdict, triggered, th)


# --- calibration --------------------------------------------------------------

@dataclass(frozen=True)
class RocPoint:
    threshold: float
    tpr: float
    fpr: float


@dataclass(frozen=True)
class ScoreCalibration:
    threshold: float
    youden_j: float
    accuracy: float
    roc: tuple[RocPoint, ...]


@dataclass(frozen=True)
class CalibrationResult:
    thresholds: Thresholds
    per_score: Mapping[str, ScoreCalibration]
    accuracy: float
    n_covers: int
    n_stegos: int
    skipped: int = 0
    min_youden: float = 0.5

    def to_dict(self) -> dict:
        return {
            "thresholds": self.thresholds.to_dict(),
            "accuracy": self.accuracy,
            "n_covers": self.n_covers,
            "n_stegos": self.n_stegos,
            "skipped_degenerate": self.skipped,
            "min_youden": self.min_youden,
            "scores": {
                name: {
                    "threshold": cal.threshold,
                    "youden_j": cal.youden_j,
                    "accuracy": cal.accuracy,
                    "roc": [asdict(p) for p in cal.roc],
                }
                for name, cal in self.per_score.items()
            },
        }


def calibrate_score(
    cover_scores: Sequence[float],
    stego_scores: Sequence[float],
    direction: str,
) -> ScoreCalibration:
    """Pick the threshold that maximizes Youden's J, ties going to the lowest.

    Candidates are midpoints between consecutive distinct observed values,
    plus one point a unit below the minimum and one a unit above the maximum.
    """
    if not cover_scores or not stego_scores:
        raise ValueError("both score sets must be non-empty")
    if direction not in ("above", "below"):
        raise ValueError(f"direction must be 'above' or 'below', got {direction!r}")
    neg = np.asarray(cover_scores, dtype=np.float64)
    pos = np.asarray(stego_scores, dtype=np.float64)
    levels = np.unique(np.concatenate([neg, pos]))
    candidates = np.concatenate([[levels[0] - 1.0], (levels[:-1] + levels[1:]) / 2.0, [levels[-1] + 1.0]])

    roc = []
    best = None
    for t in candidates:
        if direction == "above":
            tp, fp = int(np.sum(pos > t)), int(np.sum(neg > t))
        else:
            tp, fp = int(np.sum(pos < t)), int(np.sum(neg < t))
        tpr, fpr = tp / pos.size, fp / neg.size
        j = tpr - fpr
        acc = (tp + (neg.size - fp)) / (pos.size + neg.size)
        roc.append(RocPoint(float(t), tpr, fpr))
        # candidates ascend, so strict > keeps the lowest threshold on ties
        if best is None or j > best[1] + 1e-12:
            best = (float(t), j, acc)
    return ScoreCalibration(threshold=best[0], youden_j=best[1], accuracy=best[2], roc=tuple(roc))


def calibrate(
    covers: Sequence[GrayImage],
    stegos: Sequence[GrayImage],
    rule: str = "any",
    scores: Sequence[str] = SCORE_NAMES,
    min_youden: float = 0.5,
) -> CalibrationResult:
    """Fit per-score thresholds on labeled clean and stego images.

    Degenerate images are skipped.  A score is enabled in the returned
    thresholds only if it is listed in ``scores`` and its best Youden J
    reaches ``min_youden``; weak scores would otherwise turn the
    any-score rule into a false-alarm generator.  Every listed score still
    gets its ROC summary.
    """
    if not covers or not stegos:
        raise ValueError("calibration needs at least one cover and one stego image")
    bad = set(scores) - set(SCORE_NAMES)
    if bad:
        raise ValueError(f"unknown score names: {sorted(bad)}")

    def usable(images):
        kept = [score_image(im) for im in images if not is_degenerate(im)]
        return kept, len(images) - len(kept)

    cov_vecs, skipped_c = usable(covers)
    steg_vecs, skipped_s = usable(stegos)
    if not cov_vecs or not steg_vecs:
        raise DegenerateInputError("every image in at least one labeled set is degenerate")

    per_score = {}
    for name in scores:
        per_score[name] = calibrate_score(
            [v.get(name) for v in cov_vecs],
            [v.get(name) for v in steg_vecs],
            DIRECTIONS[name],
        )
    th = Thresholds(
        values={
            n: (per_score[n].threshold if n in per_score and per_score[n].youden_j >= min_youden else None)
            for n in SCORE_NAMES
        },
        rule=rule,
    )

    def flagged(v: ScoreVector) -> bool:
        fired = [n for n in SCORE_NAMES if triggers(n, v.get(n), th.values[n])]
        return combine(fired, th, SCORE_NAMES)

    correct = sum(not flagged(v) for v in cov_vecs) + sum(flagged(v) for v in steg_vecs)
    return CalibrationResult(
        thresholds=th,
        per_score=per_score,
        accuracy=correct / (len(cov_vecs) + len(steg_vecs)),
        n_covers=len(cov_vecs),
        n_stegos=len(steg_vecs),
        skipped=skipped_c + skipped_s,
        min_youden=min_youden,
    )


# Fitted by calibrate() on synthetic_corpus(20) (128x128) against full-capacity
# one-plane stegos.  Recalibrate for other image populations.
DEFAULT_THRESHOLDS = Thresholds(values={"chi_square": 97.0})
