"""Command-line interface.

Exit codes: 0 success, 1 domain error (capacity exceeded, no frame found,
degenerate calibration input), 2 usage, I/O or parse error. Inputs whose
dimensions do not match count as usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import (
    CapacityError,
    DegenerateInputError,
    DimensionError,
    FrameError,
    HistanalysisError,
    PgmParseError,
)
from .histogram import compute_histogram
from .image_core import IDENTICAL, GrayImage, load_pgm, psnr, save_pgm, slice_bitplane
from .jpeg_sim import jpeg_roundtrip
from .steganalysis import (
    DEFAULT_THRESHOLDS,
    RULES,
    SCORE_NAMES,
    Thresholds,
    calibrate,
    detect,
)
from .stego import StegoKey, embed, extract

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad flags, unreadable inputs or unparsable files."""


# --- I/O helpers ----------------------------------------------------------------

def atomic_write(path: Path, data: bytes) -> None:
    """Write ``data`` to ``path`` via a sibling temp file and rename."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _read_bytes(path: Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def read_image(path: Path) -> GrayImage:
    try:
        return load_pgm(_read_bytes(path))
    except PgmParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def write_image(path: Path, img: GrayImage) -> None:
    atomic_write(path, save_pgm(img))


def to_json(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("utf-8")


def histogram_csv(img: GrayImage) -> bytes:
    counts = compute_histogram(img).counts
    lines = ["level,count"] + [f"{level},{int(n)}" for level, n in enumerate(counts)]
    return ("\n".join(lines) + "\n").encode("ascii")


def _key(seed: Optional[int]) -> Optional[StegoKey]:
    return None if seed is None else StegoKey(seed)


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("key must be an unsigned 64-bit integer")
    return v


def _expand_images(paths: Sequence[Path]) -> list[Path]:
    out = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            out.extend(sorted(q for q in p.iterdir() if q.suffix.lower() == ".pgm" and q.is_file()))
        else:
            out.append(p)
    return out


def load_thresholds(path: Optional[Path]) -> Thresholds:
    if path is None:
        return DEFAULT_THRESHOLDS
    try:
        doc = json.loads(_read_bytes(path))
        return Thresholds.from_dict(doc)
    except (ValueError, TypeError, AttributeError) as exc:
        raise UsageError(f"{path}: invalid thresholds file: {exc}") from None


# --- subcommands ------------------------------------------------------------------

def cmd_embed(args) -> int:
    cover = read_image(args.cover)
    message = _read_bytes(args.message)
    stego = embed(cover, message, args.planes, _key(args.key))
    write_image(args.out, stego)
    return EXIT_OK


def cmd_extract(args) -> int:
    stego = read_image(args.stego)
    message = extract(stego, args.planes, _key(args.key))
    atomic_write(args.out, message)
    return EXIT_OK


def cmd_planes(args) -> int:
    img = read_image(args.image)
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {out_dir}: {exc.strerror or exc}") from None
    planes = range(8) if args.plane is None else [args.plane]
    for k in planes:
        write_image(out_dir / f"{args.prefix}{k}.pgm", slice_bitplane(img, k).as_image())
    return EXIT_OK


def cmd_hist(args) -> int:
    atomic_write(args.out, histogram_csv(read_image(args.image)))
    return EXIT_OK


def cmd_psnr(args) -> int:
    a, b = read_image(args.a), read_image(args.b)
    value = psnr(a, b)
    print(IDENTICAL if value == IDENTICAL else f"{value:.4f}")
    return EXIT_OK


def cmd_jpegsim(args) -> int:
    write_image(args.out, jpeg_roundtrip(read_image(args.image), args.quality))
    return EXIT_OK


def cmd_detect(args) -> int:
    th = load_thresholds(args.thresholds)
    paths = _expand_images(args.image)
    if not paths:
        raise UsageError("no input images")
    images = [read_image(p) for p in paths]
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        reports = list(pool.map(lambda im: detect(im, th).to_dict(), images))
    if len(args.image) == 1 and not Path(args.image[0]).is_dir():
        doc = reports[0]
    else:
        order = sorted(range(len(paths)), key=lambda i: str(paths[i]))
        doc = [dict(reports[i], file=str(paths[i])) for i in order]
    data = to_json(doc)
    if args.out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        atomic_write(args.out, data)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    covers = [read_image(p) for p in _expand_images(args.covers)]
    stegos = [read_image(p) for p in _expand_images(args.stegos)]
    if not covers or not stegos:
        raise UsageError("calibrate needs at least one cover and one stego image")
    scores = tuple(args.scores.split(",")) if args.scores else SCORE_NAMES
    bad = set(scores) - set(SCORE_NAMES)
    if bad:
        raise UsageError(f"unknown score names: {', '.join(sorted(bad))}")
    result = calibrate(covers, stegos, rule=args.rule, scores=scores, min_youden=args.min_youden)
    atomic_write(args.out, to_json(result.to_dict()))
    return EXIT_OK


# --- parser -------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # one-line diagnostic, exit 2
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _planes(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 1 <= v <= 3:
        raise argparse.ArgumentTypeError("planes must be 1, 2 or 3")
    return v


def _quality(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 1 <= v <= 100:
        raise argparse.ArgumentTypeError("quality must be in 1..100")
    return v


def _plane_index(text: str) -> int:
    v = int(text)
    if not 0 <= v <= 7:
        raise argparse.ArgumentTypeError("plane must be in 0..7")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="histanalysis", description="Bit-plane steganography and histogram steganalysis.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("embed", help="hide a message file in the low bit-planes of a PGM")
    s.add_argument("--cover", type=Path, required=True)
    s.add_argument("--message", type=Path, required=True)
    s.add_argument("--planes", type=_planes, default=1)
    s.add_argument("--key", type=_u64, default=None, help="64-bit whitening seed")
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("extract", help="recover a message embedded by 'embed'")
    s.add_argument("--stego", type=Path, required=True)
    s.add_argument("--planes", type=_planes, default=1)
    s.add_argument("--key", type=_u64, default=None)
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("planes", help="write bit-planes as 0/255 PGM images")
    s.add_argument("--image", type=Path, required=True)
    s.add_argument("--out-dir", type=Path, required=True)
    s.add_argument("--plane", type=_plane_index, default=None, help="only this plane (default: all 8)")
    s.add_argument("--prefix", default="plane_")
    s.set_defaults(func=cmd_planes)

    s = sub.add_parser("hist", help="export the gray-level histogram as CSV")
    s.add_argument("--image", type=Path, required=True)
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_hist)

    s = sub.add_parser("psnr", help="print the PSNR between two images")
    s.add_argument("--a", type=Path, required=True)
    s.add_argument("--b", type=Path, required=True)
    s.set_defaults(func=cmd_psnr)

    s = sub.add_parser("jpegsim", help="pass an image through the lossy JPEG round trip")
    s.add_argument("--image", type=Path, required=True)
    s.add_argument("--quality", type=_quality, default=50)
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_jpegsim)

    s = sub.add_parser("detect", help="score images and emit JSON detection reports")
    s.add_argument("--image", type=Path, nargs="+", required=True, help="PGM files or directories")
    s.add_argument("--thresholds", type=Path, default=None)
    s.add_argument("--out", type=Path, default=None, help="write JSON here instead of stdout")
    s.add_argument("--jobs", type=int, default=4)
    s.set_defaults(func=cmd_detect)

    s = sub.add_parser("calibrate", help="fit thresholds on labeled cover/stego sets")
    s.add_argument("--covers", type=Path, nargs="+", required=True)
    s.add_argument("--stegos", type=Path, nargs="+", required=True)
    s.add_argument("--rule", choices=RULES, default="any")
    s.add_argument("--scores", default=None, help="comma-separated subset of: " + ",".join(SCORE_NAMES))
    s.add_argument("--min-youden", type=float, default=0.5)
    s.add_argument("--out", type=Path, required=True)
    s.set_defaults(func=cmd_calibrate)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, DimensionError) as exc:
        print(f"histanalysis {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapacityError, FrameError, DegenerateInputError) as exc:
        print(f"histanalysis {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"histanalysis {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HistanalysisError as exc:
        print(f"histanalysis {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())
