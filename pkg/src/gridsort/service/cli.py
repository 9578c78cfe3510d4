"""Command-line entry points: index, sort, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..features import combine_all
from ..imgscan import FilterSpec, ScanRequest
from ..sortgrid import SortConfig, sortedness
from ..store import open_store, read_embeddings
from .pipeline import (
    INDEX_FILENAME,
    index_corpus,
    layout_manifest,
    prepare_projection,
    render_montage,
    sort_records,
    store_part_dims,
)

DEFAULT_CACHE = "~/.cache/gridsort"


def _parse_size_range(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        lo, hi = text.split(":", 1)
        return (int(lo), int(hi))
    except ValueError as exc:
        raise click.BadParameter(f"expected LO:HI bytes, got {text!r}") from exc


def _build_filter(filter_name: str | None, filter_size: str | None) -> FilterSpec:
    try:
        return FilterSpec(
            name_substring=filter_name, size_range=_parse_size_range(filter_size)
        )
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc


def _run_index(paths, recursive, cache_dir, embeddings_path, filter_spec, include_hidden):
    cache = Path(cache_dir).expanduser()
    cache.mkdir(parents=True, exist_ok=True)

    embeddings = None
    projection = None
    if embeddings_path:
        embeddings = read_embeddings(embeddings_path)
        projection = prepare_projection(embeddings, cache)

    store = open_store(cache / INDEX_FILENAME, store_part_dims(embeddings, cache))
    request = ScanRequest(
        roots=tuple(paths),
        recursive=recursive,
        filter=filter_spec,
        include_hidden=include_hidden,
    )

    done_marks = {0}

    def progress(done: int, total: int) -> None:
        decile = (10 * done) // max(total, 1)
        if decile not in done_marks:
            done_marks.add(decile)
            click.echo(f"  features {done}/{total}")

    result = index_corpus(
        request, store, embeddings=embeddings, projection=projection, progress=progress
    )
    store.close()
    return result, store


@click.group()
def main():
    """Local-first visual image explorer."""


@main.command()
@click.argument("paths", nargs=-1, required=True, type=click.Path())
@click.option("--recursive", "-r", is_flag=True, help="Descend into subfolders.")
@click.option("--cache-dir", default=DEFAULT_CACHE, show_default=True)
@click.option(
    "--embeddings",
    "embeddings_path",
    type=click.Path(exists=True),
    default=None,
    help="Raw embedding sidecar to compress and attach.",
)
@click.option("--filter-name", default=None, help="Keep files whose name contains this.")
@click.option("--filter-size", default=None, help="Keep files within LO:HI bytes.")
@click.option("--include-hidden", is_flag=True, help="Also scan dot-prefixed entries.")
def index(paths, recursive, cache_dir, embeddings_path, filter_name, filter_size, include_hidden):
    """Scan folders and build or refresh the descriptor index."""
    filter_spec = _build_filter(filter_name, filter_size)
    result, _store = _run_index(
        paths, recursive, cache_dir, embeddings_path, filter_spec, include_hidden
    )
    stats = result.stats
    click.echo(f"scan: {stats.scanned} files in {stats.scan_seconds:.3f} s")
    click.echo(
        f"features: computed={stats.computed} hits={stats.cache_hits} "
        f"failures={stats.decode_failures} decodes={stats.decodes} "
        f"({100.0 * stats.hit_ratio:.1f}% hits) in {stats.feature_seconds:.3f} s"
    )
    click.echo(f"store: flushed in {stats.store_seconds:.3f} s")
    for err in stats.root_errors:
        click.echo(f"root error: {err}", err=True)
    if stats.root_errors:
        sys.exit(2)


@main.command()
@click.argument("paths", nargs=-1, required=True, type=click.Path())
@click.option("--columns", "-c", default=8, show_default=True, type=click.IntRange(min=1))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--output", "-o", default="montage.png", show_default=True)
@click.option("--manifest", "manifest_path", default=None, help="Write the cell map as JSON.")
@click.option("--cell-edge", default=96, show_default=True, type=click.IntRange(min=16))
@click.option("--recursive", "-r", is_flag=True)
@click.option("--cache-dir", default=DEFAULT_CACHE, show_default=True)
@click.option("--no-shuffle", is_flag=True, help="Start from scan order instead of a seeded shuffle.")
def sort(paths, columns, seed, output, manifest_path, cell_edge, recursive, cache_dir, no_shuffle):
    """Visually sort folders into a montage PNG plus a position manifest."""
    result, _store = _run_index(paths, recursive, cache_dir, None, FilterSpec(), False)
    if not result.descriptors:
        click.echo("nothing decodable to sort", err=True)
        sys.exit(2 if result.stats.root_errors else 1)

    config = SortConfig(seed=seed, shuffle=not no_shuffle)
    layout, items = sort_records(result.records, result.descriptors, columns, config)
    matrix = combine_all((result.descriptors[r.id] for r in items), config.profile)
    click.echo(
        f"sorted {layout.count} images on {layout.columns} x {layout.rows} "
        f"(mean neighbor distance {sortedness(layout, matrix):.4f})"
    )

    render_montage(layout, items, cell_edge=cell_edge).save(output)
    click.echo(f"montage written to {output}")
    if manifest_path:
        Path(manifest_path).write_text(
            json.dumps(layout_manifest(layout, items, seed), indent=2)
        )
        click.echo(f"manifest written to {manifest_path}")
    if result.stats.root_errors:
        sys.exit(2)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True, help="Loopback by default.")
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--cache-dir", default=DEFAULT_CACHE, show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--columns", default=8, show_default=True, type=click.IntRange(min=1))
@click.option("--ui-dir", default=None, type=click.Path(), help="Static frontend to mount at /.")
def serve(host, port, cache_dir, seed, columns, ui_dir):
    """Run the local HTTP API (and optionally the browser UI)."""
    import uvicorn

    from .api import create_app
    from .session import Session

    session = Session(Path(cache_dir).expanduser(), seed=seed, columns=columns)
    app = create_app(session, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
