"""Discover image files on disk, decode pixels, and build thumbnails.

Scanning walks one or more folder roots (optionally recursive), applies
metadata filters per file, and returns path-sorted records. Decoding and
thumbnailing are pure per-file helpers used by the indexing pipeline; they
share no state and are safe to run in parallel across files.
"""

from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, EngineError, PermissionDenied, RootNotFound

logger = logging.getLogger(__name__)

# Portable raster formats only. GIF decodes as its first frame.
DEFAULT_EXTENSIONS = frozenset({"png", "jpg", "jpeg", "bmp", "gif", "webp"})

SORT_KEYS = ("name", "mtime", "ctime", "size")

MIN_THUMB_EDGE = 16


def path_id(path: str) -> str:
    """Stable 128-bit hex identifier derived from the absolute path alone."""
    digest = hashlib.blake2b(os.path.abspath(path).encode("utf-8"), digest_size=16)
    return digest.hexdigest()


@dataclass
class ImageRecord:
    """One discovered image file; width/height stay 0 until decoded."""

    id: str
    path: str
    size_bytes: int
    mtime_ns: int
    ctime_ns: int
    width: int = 0
    height: int = 0
    folder_id: str = ""
    decode_failed: bool = False

    @classmethod
    def from_path(cls, path: str, folder_id: str = "") -> "ImageRecord":
        abspath = os.path.abspath(path)
        st = os.stat(abspath)
        return cls(
            id=path_id(abspath),
            path=abspath,
            size_bytes=st.st_size,
            mtime_ns=st.st_mtime_ns,
            ctime_ns=st.st_ctime_ns,
            folder_id=folder_id,
        )

    @property
    def name(self) -> str:
        return os.path.basename(self.path)


@dataclass(frozen=True)
class FilterSpec:
    """Metadata predicates; an empty spec matches every file.

    Ranges are inclusive [lo, hi]; time ranges are in nanoseconds to match
    the record fields, sizes in bytes. The name match is case-insensitive.
    """

    name_substring: str | None = None
    mtime_range: tuple[int, int] | None = None
    ctime_range: tuple[int, int] | None = None
    size_range: tuple[int, int] | None = None

    def __post_init__(self):
        for label in ("mtime_range", "ctime_range", "size_range"):
            rng = getattr(self, label)
            if rng is None:
                continue
            lo, hi = rng
            if lo > hi:
                raise ValueError(f"{label} has lo > hi: {rng}")
            object.__setattr__(self, label, (lo, hi))

    def matches(self, record: ImageRecord) -> bool:
        if self.name_substring:
            if self.name_substring.lower() not in record.name.lower():
                return False
        for rng, value in (
            (self.mtime_range, record.mtime_ns),
            (self.ctime_range, record.ctime_ns),
            (self.size_range, record.size_bytes),
        ):
            if rng is not None and not rng[0] <= value <= rng[1]:
                return False
        return True


@dataclass
class ScanRequest:
    """Folders to list plus the predicates every file must pass.

    Roots are deduplicated; when recursive, a root lying inside another root
    is dropped so nothing gets listed twice.
    """

    roots: tuple[str, ...]
    recursive: bool = False
    filter: FilterSpec = field(default_factory=FilterSpec)
    extensions: frozenset[str] = DEFAULT_EXTENSIONS
    include_hidden: bool = False

    def __post_init__(self):
        if not self.roots:
            raise ValueError("at least one scan root is required")
        unique = list(dict.fromkeys(os.path.abspath(r) for r in self.roots))
        if self.recursive:
            kept = []
            for root in unique:
                ancestors = (
                    other
                    for other in unique
                    if other != root and _is_descendant(root, other)
                )
                if not any(ancestors):
                    kept.append(root)
            unique = kept
        self.roots = tuple(unique)
        self.extensions = frozenset(e.lower().lstrip(".") for e in self.extensions)


def _is_descendant(path: str, ancestor: str) -> bool:
    return os.path.commonpath([path, ancestor]) == ancestor


def scan(request: ScanRequest, errors: list[EngineError] | None = None) -> list[ImageRecord]:
    """List image files under the request roots, path-sorted, no duplicates.

    Per-root failures (missing root, unreadable directory) are appended to
    *errors* when a list is given, logged otherwise; the remaining roots
    still scan.
    """
    collected: list[ImageRecord] = []
    for root in request.roots:
        _scan_root(root, request, collected, errors)
    collected.sort(key=lambda r: r.path)
    seen: set[str] = set()
    unique: list[ImageRecord] = []
    for rec in collected:
        if rec.id not in seen:
            seen.add(rec.id)
            unique.append(rec)
    return unique


def _report(err: EngineError, errors: list[EngineError] | None) -> None:
    if errors is not None:
        errors.append(err)
    else:
        logger.warning("%s", err)


def _scan_root(
    root: str,
    request: ScanRequest,
    out: list[ImageRecord],
    errors: list[EngineError] | None,
) -> None:
    root_abs = os.path.abspath(root)
    if not os.path.isdir(root_abs):
        _report(RootNotFound(root_abs), errors)
        return
    folder = path_id(root_abs)
    if request.recursive:
        def onerror(err: OSError) -> None:
            target = err.filename or root_abs
            if isinstance(err, PermissionError):
                _report(PermissionDenied(target), errors)
            else:
                _report(RootNotFound(target), errors)

        # followlinks stays False: symlinked directories could form cycles.
        for dirpath, dirnames, filenames in os.walk(
            root_abs, topdown=True, onerror=onerror, followlinks=False
        ):
            if not request.include_hidden:
                dirnames[:] = [d for d in dirnames if not d.startswith(".")]
            dirnames.sort()
            for name in filenames:
                _consider(os.path.join(dirpath, name), folder, request, out)
    else:
        try:
            with os.scandir(root_abs) as it:
                entries = [e.path for e in it if e.is_file(follow_symlinks=False)]
        except PermissionError:
            _report(PermissionDenied(root_abs), errors)
            return
        except FileNotFoundError:
            _report(RootNotFound(root_abs), errors)
            return
        for path in entries:
            _consider(path, folder, request, out)


def _consider(path: str, folder_id: str, request: ScanRequest, out: list[ImageRecord]) -> None:
    name = os.path.basename(path)
    if not request.include_hidden and name.startswith("."):
        return
    ext = os.path.splitext(name)[1].lower().lstrip(".")
    if ext not in request.extensions:
        return
    if os.path.islink(path):
        return
    try:
        record = ImageRecord.from_path(path, folder_id)
    except OSError:
        logger.debug("file vanished during scan: %s", path)
        return
    if request.filter.matches(record):
        out.append(record)


def decode(record: ImageRecord) -> np.ndarray:
    """Decode a record's file into a rows x cols x RGB uint8 buffer.

    Updates the record's dimensions on success. On failure the record is
    flagged undecodable (kept in listings, skipped for features) and
    DecodeError raises.
    """
    try:
        with Image.open(record.path) as img:
            pixels = np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as exc:
        record.decode_failed = True
        raise DecodeError(record.path, exc) from exc
    record.height, record.width = pixels.shape[0], pixels.shape[1]
    record.decode_failed = False
    return pixels


def thumbnail(pixels: np.ndarray, max_edge: int) -> np.ndarray:
    """Downscale so the longer edge is max_edge, keeping aspect; never upscales."""
    if max_edge < MIN_THUMB_EDGE:
        raise ValueError(f"max_edge must be >= {MIN_THUMB_EDGE}, got {max_edge}")
    arr = np.asarray(pixels)
    h, w = arr.shape[0], arr.shape[1]
    if max(h, w) <= max_edge:
        return arr.copy()
    if w >= h:
        tw, th = max_edge, max(1, round(h * max_edge / w))
    else:
        tw, th = max(1, round(w * max_edge / h)), max_edge
    img = Image.fromarray(arr).resize((tw, th), Image.Resampling.LANCZOS)
    return np.asarray(img, dtype=np.uint8)


def thumb_cache_path(cache_dir: str | Path, image_id: str, max_edge: int) -> Path:
    """Where a thumbnail lives on disk: <cache>/<id[:2]>/<id>.<edge>.png"""
    return Path(cache_dir) / image_id[:2] / f"{image_id}.{max_edge}.png"


def sort_by_metadata(
    records: list[ImageRecord], key: str, descending: bool = False
) -> list[ImageRecord]:
    """Stable sort by name/mtime/ctime/size; ties always break on path ascending."""
    if key not in SORT_KEYS:
        raise ValueError(f"unknown sort key {key!r}; expected one of {SORT_KEYS}")
    keyfunc = {
        "name": lambda r: r.name,
        "mtime": lambda r: r.mtime_ns,
        "ctime": lambda r: r.ctime_ns,
        "size": lambda r: r.size_bytes,
    }[key]
    # Two passes: path pre-sort, then a stable key sort, keeps the path
    # tiebreak ascending even for descending key order.
    out = sorted(records, key=lambda r: r.path)
    out.sort(key=keyfunc, reverse=descending)
    return out
