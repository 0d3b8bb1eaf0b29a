"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations

from typing import Optional


class HistanalysisError(Exception):
    """Base class for every error raised deliberately by this package."""


class DimensionError(HistanalysisError, ValueError):
    pass


class PgmParseError(HistanalysisError, ValueError):
    """Malformed PGM input. ``field`` names the header field at fault."""

    def __init__(self, message: str, field: str, offset: Optional[int] = None):
        super().__init__(message)
        self.field = field
        self.offset = offset


class CapacityError(HistanalysisError, ValueError):
    def __init__(self, required: int, available: int):
        super().__init__(
            f"message needs {required} carrier bits but only {available} are available"
        )
        self.required = required
        self.available = available


class FrameError(HistanalysisError, ValueError):
    """Base class for failures to recover a payload frame."""


class NoFrameError(FrameError):
    pass


class CorruptLengthError(FrameError):
    pass


class TruncatedPayloadError(FrameError):
    pass


class DegenerateInputError(HistanalysisError, ValueError):
    """Input has too little statistical mass for a score or for calibration."""


class EmptyHistogramError(DegenerateInputError):
    pass
