"""Indexing and rendering pipeline shared by the CLI and the HTTP service."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import DecodeError, EngineError
from ..features import (
    Descriptor,
    ProjectionModel,
    combine_all,
    extract_descriptor,
    fit_projection,
    project,
)
from ..imgscan import ImageRecord, ScanRequest, decode, scan, thumbnail
from ..sortgrid import GridLayout, SortConfig, ssm_sort
from ..store import FeatureStore, IndexEntry, default_part_dims

logger = logging.getLogger(__name__)

PROJECTION_FILENAME = "projection.npz"
INDEX_FILENAME = "features.gsix"


@dataclass
class IndexStats:
    scanned: int = 0
    cache_hits: int = 0
    computed: int = 0
    decodes: int = 0
    decode_failures: int = 0
    scan_seconds: float = 0.0
    feature_seconds: float = 0.0
    store_seconds: float = 0.0
    root_errors: list[EngineError] = field(default_factory=list)

    @property
    def hit_ratio(self) -> float:
        tried = self.cache_hits + self.computed + self.decode_failures
        return self.cache_hits / tried if tried else 0.0


@dataclass
class IndexResult:
    records: list[ImageRecord]
    descriptors: dict[str, Descriptor]
    stats: IndexStats


def index_records(
    records: list[ImageRecord],
    store: FeatureStore,
    embeddings: dict[str, np.ndarray] | None = None,
    projection: ProjectionModel | None = None,
    progress=None,
    stats: IndexStats | None = None,
) -> IndexResult:
    """Resolve a descriptor for every record: cache hit or fresh computation.

    Search and sorting always consume the dequantized stored vectors, so a
    freshly computed descriptor round-trips through quantization before use
    and both runs of a corpus rank identically.
    """
    stats = stats or IndexStats()
    stats.scanned = len(records)
    descriptors: dict[str, Descriptor] = {}
    started = time.perf_counter()
    for done, record in enumerate(records, start=1):
        desc = store.lookup(record.id, record.mtime_ns, record.size_bytes)
        if desc is not None:
            stats.cache_hits += 1
        else:
            try:
                pixels = decode(record)
                stats.decodes += 1
            except DecodeError:
                stats.decode_failures += 1
                if progress is not None:
                    progress(done, len(records))
                continue
            embed = None
            if embeddings and projection is not None and record.id in embeddings:
                embed = project(projection, embeddings[record.id])
            fresh = extract_descriptor(pixels, embed=embed)
            entry = IndexEntry.from_descriptor(
                record.id, record.mtime_ns, record.size_bytes, fresh
            )
            store.upsert(entry)
            desc = entry.to_descriptor()
            stats.computed += 1
        descriptors[record.id] = desc
        if progress is not None:
            progress(done, len(records))
    stats.feature_seconds = time.perf_counter() - started

    started = time.perf_counter()
    store.flush()
    stats.store_seconds = time.perf_counter() - started
    return IndexResult(records=records, descriptors=descriptors, stats=stats)


def index_corpus(
    request: ScanRequest,
    store: FeatureStore,
    embeddings: dict[str, np.ndarray] | None = None,
    projection: ProjectionModel | None = None,
    progress=None,
) -> IndexResult:
    """Scan the request roots, then index every discovered record."""
    stats = IndexStats()
    started = time.perf_counter()
    records = scan(request, stats.root_errors)
    stats.scan_seconds = time.perf_counter() - started
    return index_records(
        records,
        store,
        embeddings=embeddings,
        projection=projection,
        progress=progress,
        stats=stats,
    )


def prepare_projection(
    embeddings: dict[str, np.ndarray], cache_dir: str | Path
) -> ProjectionModel | None:
    """Load the cached compression model or fit one from the sidecar vectors.

    The model persists next to the index so later runs project new images
    consistently with already-stored ones.
    """
    model_path = Path(cache_dir) / PROJECTION_FILENAME
    if model_path.exists():
        model = ProjectionModel.load(model_path)
        sample = next(iter(embeddings.values()), None)
        if sample is not None and len(sample) != model.input_dim:
            raise ValueError(
                f"sidecar dim {len(sample)} != cached projection dim {model.input_dim}"
            )
        return model
    if len(embeddings) < 2:
        logger.warning("need >= 2 sidecar embeddings to fit a projection; skipping")
        return None
    model = fit_projection(np.stack(list(embeddings.values())))
    Path(cache_dir).mkdir(parents=True, exist_ok=True)
    model.save(model_path)
    return model


def store_part_dims(embeddings, cache_dir) -> tuple[tuple[str, int], ...]:
    """Part table for a new index, honoring a non-default projection width."""
    if not embeddings:
        return default_part_dims()
    sample_dim = len(next(iter(embeddings.values())))
    return default_part_dims(embed_dim=min(64, sample_dim))


def sort_records(
    records: list[ImageRecord],
    descriptors: dict[str, Descriptor],
    columns: int,
    config: SortConfig | None = None,
    on_stage=None,
) -> tuple[GridLayout, list[ImageRecord]]:
    """Visually sort the decodable records; returns (layout, sorted item list).

    Records without a descriptor (decode failures) are excluded: they carry
    no features to sort by.
    """
    config = config or SortConfig()
    items = [r for r in records if r.id in descriptors]
    if not items:
        raise ValueError("no decodable records to sort")
    matrix = combine_all((descriptors[r.id] for r in items), config.profile)
    layout = ssm_sort(matrix, columns, config, on_stage=on_stage)
    return layout, items


def render_montage(
    layout: GridLayout,
    items: list[ImageRecord],
    cell_edge: int = 96,
    background=(24, 24, 24),
) -> Image.Image:
    """Paste letterboxed thumbnails into the layout's grid; tail cells stay blank."""
    canvas = Image.new(
        "RGB", (layout.columns * cell_edge, layout.rows * cell_edge), background
    )
    grid = layout.grid()
    for row in range(layout.rows):
        for col in range(layout.columns):
            item = grid[row, col]
            if item < 0:
                continue
            record = items[item]
            try:
                pixels = decode(record)
            except DecodeError:
                continue
            thumb = Image.fromarray(thumbnail(pixels, cell_edge))
            x = col * cell_edge + (cell_edge - thumb.width) // 2
            y = row * cell_edge + (cell_edge - thumb.height) // 2
            canvas.paste(thumb, (x, y))
    return canvas


def layout_manifest(
    layout: GridLayout, items: list[ImageRecord], seed: int
) -> dict:
    """Position-to-path mapping for inspecting a rendered montage."""
    grid = layout.grid()
    cells = []
    for position in range(layout.rows * layout.columns):
        row, col = divmod(position, layout.columns)
        item = int(grid[row, col])
        if item < 0:
            cells.append(None)
        else:
            record = items[item]
            cells.append(
                {
                    "position": position,
                    "row": row,
                    "col": col,
                    "id": record.id,
                    "path": record.path,
                }
            )
    return {
        "columns": layout.columns,
        "rows": layout.rows,
        "count": layout.count,
        "seed": seed,
        "cells": cells,
    }
