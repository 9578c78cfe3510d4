"""Mutable explorer state shared by the HTTP endpoints.

One Session corresponds to one served engine instance. Mutations are
serialized behind a lock and bump a monotonically increasing revision;
index and sort work runs on background threads that only publish results
for the revision they were started for (last write wins).
"""

from __future__ import annotations

import io
import logging
import threading
from dataclasses import dataclass
from pathlib import Path

from PIL import Image

from ..errors import UnknownId
from ..features import SEARCH_PROFILE, SORT_PROFILE, combine_all
from ..imgscan import (
    FilterSpec,
    ImageRecord,
    ScanRequest,
    decode,
    path_id,
    scan,
    sort_by_metadata,
    thumb_cache_path,
    thumbnail,
)
from ..search import QuerySet, rank
from ..sortgrid import EMPTY, SortConfig, rows_for, ssm_sort
from ..store import open_store
from .pipeline import INDEX_FILENAME, index_records

logger = logging.getLogger(__name__)

SORT_MODES = ("visual", "name", "mtime", "ctime", "size")


@dataclass
class JobProgress:
    kind: str
    state: str = "idle"  # idle | running | done | error
    done: int = 0
    total: int = 0
    error: str | None = None

    @property
    def fraction(self) -> float:
        if self.total:
            return self.done / self.total
        return 1.0 if self.state == "done" else 0.0

    def snapshot(self) -> dict:
        return {
            "kind": self.kind,
            "state": self.state,
            "done": self.done,
            "total": self.total,
            "fraction": self.fraction,
            "error": self.error,
        }


class Session:
    def __init__(
        self,
        cache_dir: str | Path,
        seed: int = 0,
        columns: int = 8,
        thumb_edge: int = 160,
    ):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.seed = seed
        self.columns = columns
        self.thumb_edge = thumb_edge

        self._lock = threading.RLock()  # guards the published state below
        self._mutation_lock = threading.Lock()  # serializes whole mutations
        self.revision = 0
        self.roots: tuple[str, ...] = ()
        self.recursive = False
        self.filter = FilterSpec()
        self.records: list[ImageRecord] = []
        self.descriptors = {}
        self.mode = "name"
        self.selected_ids: tuple[str, ...] = ()  # survives root changes, may be unresolved

        self.index_progress = JobProgress("index")
        self.sort_progress = JobProgress("sort")
        self._index_thread: threading.Thread | None = None
        self._layout_cache: dict[tuple[int, int], list] = {}

        self._store = open_store(self.cache_dir / INDEX_FILENAME)

    # -- mutations ---------------------------------------------------------

    def set_roots(
        self,
        roots: list[str],
        recursive: bool = False,
        filter_spec: FilterSpec | None = None,
    ) -> dict:
        """Replace the active roots, rescan, and kick off background indexing.

        Mutations are serialized: the previous index job (the store's single
        writer) finishes before the next one starts, and concurrent calls
        resolve last-write-wins through the revision counter.
        """
        request = ScanRequest(
            roots=tuple(roots), recursive=recursive, filter=filter_spec or FilterSpec()
        )
        with self._mutation_lock:
            return self._set_roots_locked(request, recursive)

    def _set_roots_locked(self, request: ScanRequest, recursive: bool) -> dict:
        self.wait_for_index()  # job threads never take _mutation_lock
        with self._lock:
            errors: list = []
            records = scan(request, errors)
            self.roots = request.roots
            self.recursive = recursive
            self.filter = request.filter
            self.records = records
            self.descriptors = {}
            self.revision += 1
            self._layout_cache.clear()
            revision = self.revision

            self.index_progress = JobProgress("index", state="running", total=len(records))
            thread = threading.Thread(
                target=self._index_job, args=(list(records), revision), daemon=True
            )
            self._index_thread = thread

            by_folder: dict[str, int] = {}
            for rec in records:
                by_folder[rec.folder_id] = by_folder.get(rec.folder_id, 0) + 1
            error_by_path = {getattr(e, "path", ""): type(e).__name__ for e in errors}
            roots_summary = [
                {
                    "path": root,
                    "count": by_folder.get(path_id(root), 0),
                    "error": error_by_path.get(root),
                }
                for root in request.roots
            ]
        thread.start()
        return {"revision": revision, "count": len(records), "roots": roots_summary}

    def _index_job(self, records: list[ImageRecord], revision: int) -> None:
        progress = self.index_progress

        def on_progress(done: int, total: int) -> None:
            progress.done = done
            progress.total = total

        try:
            result = index_records(records, self._store, progress=on_progress)
        except Exception as exc:  # pragma: no cover - defensive
            logger.exception("index job failed")
            progress.state = "error"
            progress.error = str(exc)
            return
        with self._lock:
            if self.revision == revision:
                self.descriptors = result.descriptors
        progress.state = "done"

    def wait_for_index(self) -> None:
        thread = self._index_thread
        if thread is not None and thread.is_alive():
            thread.join()

    # -- queries -----------------------------------------------------------

    def grid(self, cols: int | None = None, mode: str | None = None) -> dict:
        if mode is not None and mode not in SORT_MODES:
            raise ValueError(f"unknown grid mode {mode!r}")
        with self._lock:
            if cols is not None:
                if cols < 1:
                    raise ValueError("cols must be >= 1")
                self.columns = cols
            if mode is not None:
                self.mode = mode
            columns = self.columns
            mode = self.mode
            revision = self.revision
            records = list(self.records)

        if mode == "visual":
            cells = self._visual_cells(columns, revision)
            count = sum(1 for c in cells if c is not None)
        else:
            ordered = sort_by_metadata(records, mode)
            count = len(ordered)
            rows = rows_for(count, columns) if count else 0
            cells = [r.id for r in ordered] + [None] * (rows * columns - count)
        rows = rows_for(count, columns) if count else 0
        return {
            "n": columns,
            "m": rows,
            "k": count,
            "mode": mode,
            "revision": revision,
            "cells": cells,
        }

    def _visual_cells(self, columns: int, revision: int) -> list:
        self.wait_for_index()
        with self._lock:
            key = (self.revision, columns)
            cached = self._layout_cache.get(key)
            if cached is not None:
                return list(cached)
            records = list(self.records)
            descriptors = dict(self.descriptors)

        items = [r for r in records if r.id in descriptors]
        if not items:
            return []
        matrix = combine_all((descriptors[r.id] for r in items), SORT_PROFILE)

        progress = JobProgress("sort", state="running")
        self.sort_progress = progress

        def on_stage(done: int, total: int) -> None:
            progress.done = done
            progress.total = total

        config = SortConfig(seed=self.seed, weight_profile=SORT_PROFILE)
        layout = ssm_sort(matrix, columns, config, on_stage=on_stage)
        layout.validate()
        progress.state = "done"

        cells = [items[int(c)].id if c != EMPTY else None for c in layout.cells]
        with self._lock:
            if self.revision == revision:
                self._layout_cache[(revision, columns)] = list(cells)
        return cells

    def search(self, query_ids: list[str], scope_ids: list[str] | None = None) -> dict:
        """Rank the scope by smallest distance to any resolvable query id.

        Ids that do not resolve to a descriptor stay in the session selection
        and come back as unresolved instead of being dropped.
        """
        if not query_ids:
            raise ValueError("query_ids must be nonempty")
        self.wait_for_index()
        with self._lock:
            descriptors = dict(self.descriptors)
            if scope_ids is None:
                scope = tuple(r.id for r in self.records if r.id in descriptors)
            else:
                scope = tuple(i for i in scope_ids if i in descriptors)
            self.selected_ids = tuple(dict.fromkeys(query_ids))

        resolved = tuple(q for q in query_ids if q in descriptors)
        unresolved = tuple(q for q in query_ids if q not in descriptors)
        if not resolved:
            raise UnknownId(query_ids[0])
        queries = QuerySet(query_ids=resolved, scope_ids=scope, profile=SEARCH_PROFILE)
        ranked = rank(queries, descriptors)
        return {
            "results": [{"id": image_id, "distance": dist} for image_id, dist in ranked],
            "unresolved": list(unresolved),
        }

    def record_by_id(self, image_id: str) -> ImageRecord:
        with self._lock:
            for record in self.records:
                if record.id == image_id:
                    return record
        raise UnknownId(image_id)

    def thumbnail_bytes(self, image_id: str, edge: int) -> bytes:
        """PNG thumbnail bytes, cached on disk under the shared cache layout."""
        record = self.record_by_id(image_id)
        cache_file = thumb_cache_path(self.cache_dir / "thumbs", image_id, edge)
        if cache_file.exists():
            return cache_file.read_bytes()
        pixels = decode(record)  # DecodeError propagates to the API layer
        buf = io.BytesIO()
        Image.fromarray(thumbnail(pixels, edge)).save(buf, format="PNG")
        data = buf.getvalue()
        cache_file.parent.mkdir(parents=True, exist_ok=True)
        cache_file.write_bytes(data)
        return data

    def image_path(self, image_id: str) -> str:
        path = self.record_by_id(image_id).path
        if not Path(path).is_file():  # vanished since the scan
            raise UnknownId(image_id)
        return path

    def progress(self) -> dict:
        return {
            "revision": self.revision,
            "index": self.index_progress.snapshot(),
            "sort": self.sort_progress.snapshot(),
        }

    def close(self) -> None:
        self.wait_for_index()
        self._store.close()
