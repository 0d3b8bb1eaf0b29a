"""Bit-plane replacement embedding and extraction of framed messages.

Carrier bits are visited plane-major: every pixel of plane 0 in row-major
order, then plane 1, then plane 2.  The message is wrapped in a frame

    0x53 0x47 | length (uint32, big-endian) | payload

and written most-significant-bit first.  With a key, the frame bits are
XORed with a keystream taken from SHAKE-256 over the seed's 8 big-endian
bytes, so the same key both whitens and un-whitens.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityError, CorruptLengthError, NoFrameError, TruncatedPayloadError
from .image_core import GrayImage

MAGIC = b"SG"
HEADER_BYTES = 6
HEADER_BITS = 8 * HEADER_BYTES
MAX_PLANES = 3
_U64_MAX = (1 << 64) - 1


@dataclass(frozen=True)
class StegoKey:
    seed: int

    def __post_init__(self) -> None:
        if not isinstance(self.seed, int) or not 0 <= self.seed <= _U64_MAX:
            raise ValueError(f"key seed must be an unsigned 64-bit integer, got {self.seed!r}")

    def keystream(self, n_bits: int) -> np.ndarray:
        raw = hashlib.shake_256(self.seed.to_bytes(8, "big")).digest((n_bits + 7) // 8)
        return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:n_bits]


@dataclass(frozen=True)
class PayloadFrame:
    payload: bytes

    @property
    def length(self) -> int:
        return len(self.payload)

    @property
    def bit_length(self) -> int:
        return HEADER_BITS + 8 * self.length

    def to_bytes(self) -> bytes:
        if self.length > 0xFFFFFFFF:
            raise ValueError("payload longer than 2**32 - 1 bytes")
        return MAGIC + struct.pack(">I", self.length) + self.payload

    def to_bits(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self.to_bytes(), dtype=np.uint8))

    @classmethod
    def from_bytes(cls, data: bytes) -> "PayloadFrame":
        """Parse a serialized frame; trailing bytes after the payload are ignored."""
        if len(data) < HEADER_BYTES or data[:2] != MAGIC:
            raise NoFrameError("no frame found (magic mismatch)")
        (length,) = struct.unpack(">I", data[2:HEADER_BYTES])
        end = HEADER_BYTES + length
        if len(data) < end:
            raise TruncatedPayloadError(
                f"frame declares {length} payload bytes but only {len(data) - HEADER_BYTES} follow"
            )
        return cls(payload=bytes(data[HEADER_BYTES:end]))


def _check_planes(n_planes: int) -> None:
    if not isinstance(n_planes, (int, np.integer)) or not 1 <= n_planes <= MAX_PLANES:
        raise ValueError(f"n_planes must be 1, 2 or 3, got {n_planes!r}")


def capacity(img: GrayImage, n_planes: int) -> int:
    """Total carrier bits in the ``n_planes`` lowest planes (frame header included)."""
    _check_planes(n_planes)
    return img.width * img.height * n_planes


def max_message_bytes(img: GrayImage, n_planes: int) -> int:
    return max(0, (capacity(img, n_planes) - HEADER_BITS) // 8)


def _write_bits(flat: np.ndarray, bits: np.ndarray) -> None:
    npix = flat.size
    for plane in range(0, -(-bits.size // npix)):
        chunk = bits[plane * npix : (plane + 1) * npix].astype(np.uint8)
        n = chunk.size
        mask = np.uint8(0xFF ^ (1 << plane))
        flat[:n] = (flat[:n] & mask) | (chunk << np.uint8(plane))


def _read_bits(flat: np.ndarray, start: int, stop: int) -> np.ndarray:
    npix = flat.size
    out = np.empty(stop - start, dtype=np.uint8)
    pos = start
    while pos < stop:
        plane, pix = divmod(pos, npix)
        n = min(stop - pos, npix - pix)
        out[pos - start : pos - start + n] = (flat[pix : pix + n] >> np.uint8(plane)) & np.uint8(1)
        pos += n
    return out


def embed(
    cover: GrayImage,
    message: bytes,
    n_planes: int,
    key: Optional[StegoKey] = None,
) -> GrayImage:
    available = capacity(cover, n_planes)
    frame = PayloadFrame(bytes(message))
    if frame.bit_length > available:
        raise CapacityError(required=frame.bit_length, available=available)
    bits = frame.to_bits()
    if key is not None:
        bits = bits ^ key.keystream(bits.size)
    flat = cover.flat().copy()
    _write_bits(flat, bits)
    return GrayImage(width=cover.width, height=cover.height, pixels=flat.reshape(cover.height, cover.width))


def extract(stego: GrayImage, n_planes: int, key: Optional[StegoKey] = None) -> bytes:
    available = capacity(stego, n_planes)
    if available < HEADER_BITS:
        raise NoFrameError("no frame found (carrier smaller than a frame header)")
    flat = stego.flat()
    header = _read_bits(flat, 0, HEADER_BITS)
    stream = None
    if key is not None:
        stream = key.keystream(HEADER_BITS)
        header = header ^ stream
    head = np.packbits(header).tobytes()
    if head[:2] != MAGIC:
        raise NoFrameError("no frame found (magic mismatch)")
    (length,) = struct.unpack(">I", head[2:])
    total = HEADER_BITS + 8 * length
    if total > available:
        raise CorruptLengthError(
            f"frame declares {length} payload bytes ({total} bits) but the "
            f"{n_planes}-plane carrier holds only {available} bits"
        )
    body = _read_bits(flat, HEADER_BITS, total)
    if key is not None:
        body = body ^ key.keystream(total)[HEADER_BITS:]
    return np.packbits(body).tobytes()
