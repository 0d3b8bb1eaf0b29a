import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from histanalysis.errors import DegenerateInputError, EmptyHistogramError
from histanalysis.histogram import Histogram, compute_histogram
from histanalysis.image_core import GrayImage
from histanalysis.jpeg_sim import jpeg_roundtrip
from histanalysis.steganalysis import (
    CLEAN,
    DEFAULT_THRESHOLDS,
    DEGENERATE,
    SCORE_NAMES,
    SUSPECTED,
    Thresholds,
    calibrate,
    calibrate_score,
    comb_score,
    detect,
    discontinuity_score,
    empty_bin_ratio,
    pov_chi_square,
    score_histogram,
    score_image,
)

from conftest import full_capacity_stego


def hist(pairs):
    c = np.zeros(256, dtype=np.int64)
    for level, n in pairs.items():
        c[level] = n
    return Histogram(c)


counts_strategy = arrays(np.int64, 256, elements=st.integers(0, 500)).filter(lambda c: c.sum() > 0)


# --- chi-square ---------------------------------------------------------------------

def test_chi_square_balanced_is_zero():
    assert pov_chi_square(hist({10: 7, 11: 7, 200: 3, 201: 3})) == (0.0, 2)


def test_chi_square_single_bin():
    assert pov_chi_square(hist({0: 100})) == (100.0, 1)


def test_chi_square_empty():
    with pytest.raises(EmptyHistogramError):
        pov_chi_square(Histogram(np.zeros(256, int)))


@given(counts_strategy)
@settings(max_examples=100, deadline=None)
def test_chi_square_zero_iff_balanced(counts):
    stat, dof = pov_chi_square(Histogram(counts))
    balanced = np.array_equal(counts[0::2], counts[1::2])
    assert (stat == 0.0) == balanced
    assert stat >= 0.0
    assert dof == int(np.count_nonzero(counts[0::2] + counts[1::2]))


def test_chi_square_drops_after_embedding(corpus, stegos_1plane):
    for cover, stego in zip(corpus, stegos_1plane):
        assert score_image(stego).chi_square < score_image(cover).chi_square


# --- comb ------------------------------------------------------------------------------

def test_comb_monotone_is_zero():
    assert comb_score(hist({k: k for k in range(40, 120)})) == 0.0


def test_comb_alternating_is_one():
    assert comb_score(hist({k: 10 for k in range(0, 256, 2)})) == 1.0


def test_comb_degenerate():
    with pytest.raises(DegenerateInputError):
        comb_score(hist({5: 3, 6: 1}))


def test_comb_rises_after_stego_and_jpeg(corpus):
    for i, cover in enumerate(corpus[:8]):
        processed = jpeg_roundtrip(full_capacity_stego(cover, 3, 50 + i), 50)
        assert score_image(processed).comb > score_image(cover).comb


# --- discontinuity ----------------------------------------------------------------------

def test_discontinuity_uniform_is_zero():
    assert discontinuity_score(Histogram(np.full(256, 4))) == 0.0


@pytest.mark.parametrize("level, expected", [(128, 2.0), (0, 1.0), (255, 1.0)])
def test_discontinuity_single_level(level, expected):
    assert discontinuity_score(hist({level: 9})) == expected


def test_discontinuity_rises_after_stego_and_jpeg(corpus):
    for i, cover in enumerate(corpus[:8]):
        processed = jpeg_roundtrip(full_capacity_stego(cover, 3, 50 + i), 50)
        assert score_image(processed).discontinuity > score_image(cover).discontinuity


# --- empty bins -----------------------------------------------------------------------------

def test_empty_bins_continuous_is_zero():
    assert empty_bin_ratio(hist({k: 1 for k in range(30, 90)})) == 0.0


def test_empty_bins_two_levels():
    assert empty_bin_ratio(hist({10: 4, 20: 4})) == 1.0


def test_empty_bins_adjacent_levels():
    assert empty_bin_ratio(hist({10: 4, 11: 4})) == 0.0


def test_empty_bins_degenerate():
    with pytest.raises(DegenerateInputError):
        empty_bin_ratio(hist({10: 4}))


@given(counts_strategy)
@settings(max_examples=100, deadline=None)
def test_bounded_scores(counts):
    s = score_histogram(Histogram(counts))
    assert s.comb is None or 0.0 <= s.comb <= 1.0
    assert s.empty_bin_ratio is None or 0.0 <= s.empty_bin_ratio <= 1.0
    assert s.discontinuity >= 0.0


@given(arrays(np.uint8, (32, 40)), st.randoms(use_true_random=False))
@settings(max_examples=30, deadline=None)
def test_scores_permutation_invariant(pixels, rnd):
    flat = pixels.reshape(-1).tolist()
    rnd.shuffle(flat)
    a = score_image(GrayImage.from_array(pixels))
    b = score_image(GrayImage.from_array(np.array(flat, np.uint8).reshape(32, 40)))
    assert a == b


# --- thresholds --------------------------------------------------------------------------

def test_thresholds_json_round_trip():
    th = Thresholds({"chi_square": 12.5, "comb": 0.4}, rule="majority", weights={"comb": 2.0})
    doc = json.loads(json.dumps(th.to_dict()))
    assert Thresholds.from_dict(doc) == th
    assert Thresholds.from_dict({"thresholds": doc}) == th
    assert th.enabled() == ["chi_square", "comb"]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"values": {"chi_square": float("inf")}},
        {"values": {"bogus": 1.0}},
        {"values": {}, "rule": "unanimous"},
        {"values": {}, "weights": {"comb": -1.0}},
    ],
)
def test_thresholds_validation(kwargs):
    with pytest.raises(ValueError):
        Thresholds(**kwargs)


def test_from_dict_requires_values():
    with pytest.raises(ValueError):
        Thresholds.from_dict({"rule": "any"})


# --- detect -------------------------------------------------------------------------------

def test_constant_image_is_degenerate():
    report = detect(GrayImage.from_array(np.full((64, 64), 77, np.uint8)), DEFAULT_THRESHOLDS)
    assert report.verdict == DEGENERATE
    assert report.scores.comb is None and report.scores.empty_bin_ratio is None


def test_small_image_is_degenerate(rng):
    img = GrayImage.from_array(rng.integers(0, 256, (31, 33), dtype=np.uint8))
    assert detect(img, Thresholds({"chi_square": 1e9})).verdict == DEGENERATE


@given(st.lists(st.integers(0, 255), min_size=1, max_size=2, unique=True), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_never_suspects_degenerate(levels, seed):
    rng = np.random.default_rng(seed)
    img = GrayImage.from_array(rng.choice(levels, (40, 40)).astype(np.uint8))
    th = Thresholds({"chi_square": 1e12, "comb": -1.0, "discontinuity": -1.0, "empty_bin_ratio": -1.0})
    assert detect(img, th).verdict == DEGENERATE


def test_combination_rules():
    img = GrayImage.from_array(np.tile(np.arange(0, 256, 2, dtype=np.uint8), (16, 1)))
    s = score_image(img)
    # chi_square and comb fire, discontinuity and empty_bin_ratio do not
    values = {
        "chi_square": s.chi_square + 1,
        "comb": s.comb - 0.1,
        "discontinuity": s.discontinuity + 1,
        "empty_bin_ratio": s.empty_bin_ratio + 0.1,
    }
    assert detect(img, Thresholds(values, "any")).verdict == SUSPECTED
    assert detect(img, Thresholds(values, "majority")).verdict == CLEAN
    assert detect(img, Thresholds(values, "weighted")).verdict == CLEAN
    heavy = {"chi_square": 3.0, "comb": 1.0, "discontinuity": 1.0, "empty_bin_ratio": 1.0}
    assert detect(img, Thresholds(values, "weighted", heavy)).verdict == SUSPECTED
    report = detect(img, Thresholds(values, "any"))
    assert report.triggered == ("chi_square", "comb")
    assert set(report.to_dict()) == {"scores", "verdict", "triggered", "thresholds"}


def test_no_enabled_scores_is_clean(corpus):
    assert detect(corpus[0], Thresholds({})).verdict == CLEAN


# --- calibration ---------------------------------------------------------------------------

def test_separable_calibration():
    cal = calibrate_score([10.0] * 5, [2.0] * 5, "below")
    assert 2.0 < cal.threshold < 10.0
    assert cal.threshold == 6.0
    assert cal.accuracy == 1.0 and cal.youden_j == 1.0
    assert [(p.threshold, p.tpr, p.fpr) for p in cal.roc] == [(1.0, 0.0, 0.0), (6.0, 1.0, 0.0), (11.0, 1.0, 1.0)]


def test_separable_above():
    cal = calibrate_score([0.1, 0.2], [0.5, 0.9], "above")
    assert cal.threshold == pytest.approx(0.35) and cal.accuracy == 1.0


def test_identical_distributions():
    cal = calibrate_score([3.0] * 6, [3.0] * 6, "above")
    assert cal.youden_j == 0.0 and cal.accuracy == 0.5
    assert cal.threshold == 2.0  # lowest of the tied candidates


def test_ties_go_to_lowest_threshold():
    # thresholds 1.5 and 3.5 both reach J = 0.5
    cal = calibrate_score([1.0, 3.0], [2.0, 4.0], "above")
    assert cal.youden_j == 0.5 and cal.threshold == 1.5


def test_calibrate_score_errors():
    with pytest.raises(ValueError):
        calibrate_score([], [1.0], "above")
    with pytest.raises(ValueError):
        calibrate_score([1.0], [1.0], "sideways")


def test_calibrate_corpus(corpus, stegos_1plane):
    result = calibrate(corpus, stegos_1plane)
    chi = result.per_score["chi_square"]
    assert chi.accuracy >= 0.9
    assert result.thresholds.values["chi_square"] == chi.threshold
    assert len(chi.roc) >= 3
    assert set(result.per_score) == set(SCORE_NAMES)
    doc = result.to_dict()
    assert Thresholds.from_dict(json.loads(json.dumps(doc))) == result.thresholds
    again = calibrate(corpus, stegos_1plane)
    assert again.to_dict() == doc


def test_calibrate_min_youden_disables_weak_scores(corpus, stegos_1plane):
    result = calibrate(corpus, stegos_1plane, min_youden=0.5)
    for name, cal in result.per_score.items():
        assert (result.thresholds.values[name] is None) == (cal.youden_j < 0.5)


def test_calibrated_detection(corpus, stegos_1plane):
    th = calibrate(corpus, stegos_1plane, scores=("chi_square",)).thresholds
    assert th.enabled() == ["chi_square"]
    cover_report = detect(corpus[0], th)
    assert cover_report.verdict == CLEAN and cover_report.triggered == ()
    stego_report = detect(stegos_1plane[0], th)
    assert stego_report.verdict == SUSPECTED and "chi_square" in stego_report.triggered


def test_default_thresholds_separate_corpus(corpus, stegos_1plane):
    assert all(detect(c, DEFAULT_THRESHOLDS).verdict == CLEAN for c in corpus)
    assert all(detect(s, DEFAULT_THRESHOLDS).verdict == SUSPECTED for s in stegos_1plane)


def test_calibrate_errors(corpus):
    flat = GrayImage.from_array(np.full((64, 64), 3, np.uint8))
    with pytest.raises(ValueError):
        calibrate([], corpus)
    with pytest.raises(DegenerateInputError):
        calibrate([flat], corpus)
    with pytest.raises(ValueError):
        calibrate(corpus, corpus, scores=("nope",))


def test_calibrate_skips_degenerate(corpus, stegos_1plane):
    flat = GrayImage.from_array(np.full((64, 64), 3, np.uint8))
    result = calibrate(corpus + [flat], stegos_1plane)
    assert result.skipped == 1 and result.n_covers == len(corpus)
