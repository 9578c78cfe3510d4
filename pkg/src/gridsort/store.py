"""Persisted, quantized descriptor index keyed by (path id, mtime, size).

Index file layout (all integers little-endian):

    magic "GSIX" | version u16 | part_count u8
      per part: name_len u8, ascii name, dim u16
    entry_count u64 (live count as of the last compaction; advisory)
    records until EOF:
      tag 0xA5 | id 16 raw bytes | mtime_ns i64 | size u64
      present u8 bitmask | degenerate u8 bitmask
      per present part in table order: scale f32 | dim x i8

Appends are crash-safe: a torn trailing record is dropped at load time.
Anything else that fails to parse raises CorruptIndex; the index is a pure
cache, so callers respond by rebuilding it rather than failing.

The embedding sidecar ("GSEM") carries raw external embeddings into the
pipeline: header magic | version u16 | input_dim u32 | count u32, then
(16-byte id, float32[input_dim]) records.
"""

from __future__ import annotations

import io
import logging
import os
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np

from .errors import CorruptIndex, NonFiniteInput
from .features import DEFAULT_EMBED_DIM, BASE_DIMS, PART_ORDER, Descriptor

logger = logging.getLogger(__name__)

MAGIC = b"GSIX"
VERSION = 1
RECORD_TAG = 0xA5

EMBED_MAGIC = b"GSEM"
EMBED_VERSION = 1

_ID_BYTES = 16
_FIXED_RECORD = struct.Struct("<B16sqQBB")  # tag, id, mtime_ns, size, present, degenerate


def default_part_dims(embed_dim: int = DEFAULT_EMBED_DIM) -> tuple[tuple[str, int], ...]:
    dims = dict(BASE_DIMS)
    dims["embed"] = embed_dim
    return tuple((name, dims[name]) for name in PART_ORDER)


def quantize(values) -> tuple[float, np.ndarray]:
    """Symmetric int8 quantization with one scale per vector.

    scale = max|v| / 127 (0 for the zero vector), so the peak component
    maps to +-127 exactly and the per-component round-trip error stays
    within scale/2. The returned scale is already float32-rounded to match
    what the file stores.
    """
    v = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput("vector contains NaN or infinity")
    peak = float(np.abs(v).max()) if v.size else 0.0
    if peak == 0.0:
        return 0.0, np.zeros(v.shape, dtype=np.int8)
    scale32 = np.float32(peak / 127.0)
    # float32 rounding (worst in the denormal range) must not undershoot,
    # or the peak would clip and break the scale/2 error bound
    while float(scale32) * 127.0 < peak:
        scale32 = np.nextafter(scale32, np.float32(np.inf), dtype=np.float32)
    scale = float(scale32)
    q = np.clip(np.round(v / scale), -127, 127).astype(np.int8)
    return scale, q


def dequantize(scale: float, values: np.ndarray) -> np.ndarray:
    return np.asarray(values, dtype=np.float64) * float(scale)


@dataclass
class IndexEntry:
    """Quantized descriptor of one file plus the identity it was computed for."""

    id: str
    mtime_ns: int
    size_bytes: int
    parts: dict[str, tuple[float, np.ndarray]]  # name -> (scale, int8 values)
    degenerate: frozenset[str] = frozenset()

    @classmethod
    def from_descriptor(
        cls, image_id: str, mtime_ns: int, size_bytes: int, descriptor: Descriptor
    ) -> "IndexEntry":
        parts = {
            name: quantize(vec)
            for name, vec in descriptor.parts.items()
        }
        return cls(
            id=image_id,
            mtime_ns=mtime_ns,
            size_bytes=size_bytes,
            parts=parts,
            degenerate=descriptor.degenerate,
        )

    def to_descriptor(self) -> Descriptor:
        parts = {
            name: dequantize(scale, values)
            for name, (scale, values) in self.parts.items()
        }
        ordered = {name: parts[name] for name in PART_ORDER if name in parts}
        return Descriptor(parts=ordered, degenerate=self.degenerate)


def _encode_entry(entry: IndexEntry, part_table: tuple[tuple[str, int], ...]) -> bytes:
    present = 0
    degenerate = 0
    for bit, (name, dim) in enumerate(part_table):
        if name in entry.parts:
            scale, values = entry.parts[name]
            if values.shape != (dim,):
                raise ValueError(
                    f"part {name!r} has dim {values.shape}, index expects ({dim},)"
                )
            present |= 1 << bit
        if name in entry.degenerate:
            degenerate |= 1 << bit
    out = io.BytesIO()
    out.write(
        _FIXED_RECORD.pack(
            RECORD_TAG,
            bytes.fromhex(entry.id),
            entry.mtime_ns,
            entry.size_bytes,
            present,
            degenerate,
        )
    )
    for name, _dim in part_table:
        if name in entry.parts:
            scale, values = entry.parts[name]
            out.write(struct.pack("<f", scale))
            out.write(values.tobytes())
    return out.getvalue()


class FeatureStore:
    """Single-writer cache of quantized descriptors, append-friendly on disk.

    upsert() stages entries in memory; flush() appends them durably;
    compact() atomically rewrites the file with only live entries.
    """

    def __init__(self, path: str | Path, part_dims: tuple[tuple[str, int], ...] | None = None):
        self.path = Path(path)
        self._entries: dict[str, IndexEntry] = {}
        self._pending: list[IndexEntry] = []
        self._dead = 0
        if self.path.exists() and self.path.stat().st_size > 0:
            self._part_table = self._load()
            if part_dims is not None and tuple(part_dims) != self._part_table:
                raise CorruptIndex(0, "part dimension table does not match the file")
        else:
            self._part_table = tuple(part_dims) if part_dims else default_part_dims()
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._rewrite([])

    @property
    def part_dims(self) -> tuple[tuple[str, int], ...]:
        return self._part_table

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def dead_entries(self) -> int:
        return self._dead

    def ids(self) -> Iterator[str]:
        return iter(self._entries)

    def get_entry(self, image_id: str) -> IndexEntry | None:
        return self._entries.get(image_id)

    def lookup(self, image_id: str, mtime_ns: int, size_bytes: int) -> Descriptor | None:
        """Dequantized descriptor iff the id is present and the file unchanged."""
        entry = self._entries.get(image_id)
        if entry is None:
            return None
        if entry.mtime_ns != mtime_ns or entry.size_bytes != size_bytes:
            return None  # stale: the file changed since indexing
        return entry.to_descriptor()

    def upsert(self, entry: IndexEntry) -> None:
        if len(entry.id) != 2 * _ID_BYTES:
            raise ValueError(f"entry id must be {2 * _ID_BYTES} hex chars, got {entry.id!r}")
        if entry.id in self._entries:
            self._dead += 1
        self._entries[entry.id] = entry
        self._pending.append(entry)

    def flush(self) -> None:
        """Append staged entries and fsync; prior file bytes are never touched."""
        if not self._pending:
            return
        payload = b"".join(_encode_entry(e, self._part_table) for e in self._pending)
        with open(self.path, "ab") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        self._pending.clear()

    def compact(self) -> None:
        """Atomically rewrite the file keeping only the live entry per id."""
        self._pending.clear()
        self._rewrite(list(self._entries.values()))
        self._dead = 0

    def close(self) -> None:
        self.flush()
        if self._dead > len(self._entries):
            self.compact()

    def _rewrite(self, entries: list[IndexEntry]) -> None:
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with open(tmp, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<H", VERSION))
            fh.write(struct.pack("<B", len(self._part_table)))
            for name, dim in self._part_table:
                encoded = name.encode("ascii")
                fh.write(struct.pack("<B", len(encoded)))
                fh.write(encoded)
                fh.write(struct.pack("<H", dim))
            fh.write(struct.pack("<Q", len(entries)))
            for entry in entries:
                fh.write(_encode_entry(entry, self._part_table))
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.path)

    def _load(self) -> tuple[tuple[str, int], ...]:
        data = self.path.read_bytes()
        if len(data) < 7 or data[:4] != MAGIC:
            raise CorruptIndex(0, "bad magic")
        (version,) = struct.unpack_from("<H", data, 4)
        if version != VERSION:
            raise CorruptIndex(4, f"unsupported version {version}")
        offset = 6
        (part_count,) = struct.unpack_from("<B", data, offset)
        offset += 1
        table: list[tuple[str, int]] = []
        try:
            for _ in range(part_count):
                (name_len,) = struct.unpack_from("<B", data, offset)
                offset += 1
                name = data[offset : offset + name_len].decode("ascii")
                offset += name_len
                (dim,) = struct.unpack_from("<H", data, offset)
                offset += 2
                table.append((name, dim))
            offset += 8  # advisory entry count
        except (struct.error, UnicodeDecodeError) as exc:
            raise CorruptIndex(offset, f"unreadable header: {exc}") from exc
        if offset > len(data):
            raise CorruptIndex(len(data), "truncated header")

        parsed = 0
        while offset < len(data):
            record_start = offset
            try:
                entry, offset = self._parse_record(data, offset, table)
            except _TornRecord:
                logger.warning(
                    "dropping torn record at byte %d of %s", record_start, self.path
                )
                break
            if entry.id in self._entries:
                self._dead += 1
            self._entries[entry.id] = entry
            parsed += 1
        return tuple(table)

    def _parse_record(
        self, data: bytes, offset: int, table: list[tuple[str, int]]
    ) -> tuple[IndexEntry, int]:
        if offset + _FIXED_RECORD.size > len(data):
            raise _TornRecord()
        tag, raw_id, mtime_ns, size, present, degenerate = _FIXED_RECORD.unpack_from(
            data, offset
        )
        if tag != RECORD_TAG:
            raise CorruptIndex(offset, f"bad record tag 0x{tag:02x}")
        if present >> len(table):
            raise CorruptIndex(offset, f"present mask 0x{present:02x} exceeds part table")
        offset += _FIXED_RECORD.size
        parts: dict[str, tuple[float, np.ndarray]] = {}
        degenerate_names = []
        for bit, (name, dim) in enumerate(table):
            if degenerate & (1 << bit):
                degenerate_names.append(name)
            if not present & (1 << bit):
                continue
            if offset + 4 + dim > len(data):
                raise _TornRecord()
            (scale,) = struct.unpack_from("<f", data, offset)
            offset += 4
            values = np.frombuffer(data, dtype=np.int8, count=dim, offset=offset).copy()
            offset += dim
            parts[name] = (float(scale), values)
        entry = IndexEntry(
            id=raw_id.hex(),
            mtime_ns=mtime_ns,
            size_bytes=size,
            parts=parts,
            degenerate=frozenset(degenerate_names),
        )
        return entry, offset


class _TornRecord(Exception):
    """Internal: a record ran past EOF (interrupted append)."""


def open_store(
    path: str | Path,
    part_dims: tuple[tuple[str, int], ...] | None = None,
    rebuild_on_corruption: bool = True,
) -> FeatureStore:
    """Open an index; on corruption, drop it and start fresh (it is a cache)."""
    try:
        return FeatureStore(path, part_dims)
    except CorruptIndex as exc:
        if not rebuild_on_corruption:
            raise
        logger.warning("rebuilding corrupt index %s: %s", path, exc)
        Path(path).unlink(missing_ok=True)
        return FeatureStore(path, part_dims)


def write_embeddings(path: str | Path, vectors: Mapping[str, np.ndarray]) -> None:
    """Write a raw-embedding sidecar file; every vector must share one dim."""
    items = list(vectors.items())
    if not items:
        raise ValueError("sidecar needs at least one embedding")
    dim = len(items[0][1])
    payload = io.BytesIO()
    payload.write(EMBED_MAGIC)
    payload.write(struct.pack("<HII", EMBED_VERSION, dim, len(items)))
    for image_id, vec in items:
        arr = np.asarray(vec, dtype="<f4")
        if arr.shape != (dim,):
            raise ValueError(f"embedding for {image_id} has dim {arr.shape}, expected ({dim},)")
        payload.write(bytes.fromhex(image_id))
        payload.write(arr.tobytes())
    Path(path).write_bytes(payload.getvalue())


def read_embeddings(path: str | Path) -> dict[str, np.ndarray]:
    """Load a sidecar written by write_embeddings (or a compatible producer)."""
    data = Path(path).read_bytes()
    if len(data) < 14 or data[:4] != EMBED_MAGIC:
        raise CorruptIndex(0, "not an embedding sidecar")
    version, dim, count = struct.unpack_from("<HII", data, 4)
    if version != EMBED_VERSION:
        raise CorruptIndex(4, f"unsupported sidecar version {version}")
    offset = 14
    record = _ID_BYTES + 4 * dim
    if len(data) - offset < record * count:
        raise CorruptIndex(offset, "sidecar shorter than its declared count")
    out: dict[str, np.ndarray] = {}
    for _ in range(count):
        image_id = data[offset : offset + _ID_BYTES].hex()
        offset += _ID_BYTES
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).copy()
        offset += 4 * dim
        out[image_id] = vec
    return out
