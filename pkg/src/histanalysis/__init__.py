"""Bit-plane steganography for 8-bit grayscale images and histogram-based detection."""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    CorruptLengthError,
    DegenerateInputError,
    DimensionError,
    EmptyHistogramError,
    FrameError,
    HistanalysisError,
    NoFrameError,
    PgmParseError,
    TruncatedPayloadError,
)
from .histogram import Histogram, compute_histogram, normalize, occupied_range
from .image_core import (
    IDENTICAL,
    BitPlane,
    GrayImage,
    compose_bitplanes,
    load_pgm,
    psnr,
    save_pgm,
    slice_bitplane,
)
from .jpeg_sim import (
    Q50,
    dequantize,
    forward_dct,
    inverse_dct,
    jpeg_roundtrip,
    quantize,
    scale_quant_table,
    zigzag_scan,
)
from .steganalysis import (
    DetectionReport,
    ScoreVector,
    Thresholds,
    calibrate,
    comb_score,
    detect,
    discontinuity_score,
    empty_bin_ratio,
    pov_chi_square,
)
from .stego import PayloadFrame, StegoKey, capacity, embed, extract
