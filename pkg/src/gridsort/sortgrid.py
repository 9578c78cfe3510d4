"""Arrange feature vectors on an N-column grid with hierarchical swap passes.

The grid is rectangular but only the first K scanline positions hold items;
neighborhood math clamps out-of-shape samples to the nearest occupied cell
(constant continuation) instead of wrapping around, so narrow column
layouts stay list-like: no holes, no duplicates, and empties only at the
tail of the last row.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import permutations

import numpy as np

from .features import SORT_PROFILE, WeightProfile

EMPTY = -1

_GROUP_PERMS = {g: tuple(permutations(range(g))) for g in (2, 3, 4)}


@dataclass
class GridLayout:
    """Assignment of K items to the first K scanline cells of an N x M grid."""

    columns: int
    rows: int
    count: int
    cells: np.ndarray  # length rows*columns; item index, or EMPTY in the tail

    def grid(self) -> np.ndarray:
        return self.cells.reshape(self.rows, self.columns)

    def validate(self) -> None:
        """Bijection check: every item placed once, EMPTY only in the tail."""
        if self.rows != rows_for(self.count, self.columns):
            raise ValueError(f"rows {self.rows} != ceil({self.count}/{self.columns})")
        if self.cells.shape != (self.rows * self.columns,):
            raise ValueError("cells length does not match the grid")
        occupied = self.cells[: self.count]
        if np.any(self.cells[self.count :] != EMPTY):
            raise ValueError("occupied cell found after the scanline tail boundary")
        if np.any(occupied < 0) or not np.array_equal(
            np.sort(occupied), np.arange(self.count)
        ):
            raise ValueError("cells are not a bijection onto the item set")

    def to_dict(self) -> dict:
        return {
            "n": self.columns,
            "m": self.rows,
            "k": self.count,
            "cells": [int(c) if c != EMPTY else None for c in self.cells],
        }


@dataclass
class SortConfig:
    seed: int = 0
    passes_per_stage: int = 4
    neighborhood_radius_factor: float = 0.5
    shuffle: bool = True
    restarts: int = 1  # extra seeded runs; best layout by sortedness wins
    weight_profile: WeightProfile | None = None  # used by callers building vectors

    def __post_init__(self):
        if self.passes_per_stage < 1:
            raise ValueError("passes_per_stage must be >= 1")
        if self.neighborhood_radius_factor <= 0:
            raise ValueError("neighborhood_radius_factor must be > 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")

    @property
    def profile(self) -> WeightProfile:
        return self.weight_profile or SORT_PROFILE


@dataclass
class SwapEvent:
    """One applied group permutation, for monotonicity instrumentation."""

    cell_indices: list[int]
    before: list[int]
    after: list[int]


@dataclass
class PassTrace:
    block: int
    pass_index: int
    radius: int
    targets: np.ndarray  # frozen target per scanline cell, (rows*columns, dim)
    events: list[SwapEvent] = field(default_factory=list)


def rows_for(count: int, columns: int) -> int:
    return -(-count // columns)


def valid_shape(count: int, columns: int) -> list[tuple[int, int]]:
    """The first `count` scanline positions of the ceil(count/columns)-row grid."""
    if count < 1 or columns < 1:
        raise ValueError("count and columns must be >= 1")
    return [(i // columns, i % columns) for i in range(count)]


def clamp_to_shape(position: tuple[int, int], count: int, columns: int) -> tuple[int, int]:
    """Nearest valid position: clamp into the grid, then out of the empty tail.

    Constant continuation reads the feature at the returned cell, so border
    cells get replicated rather than wrapped.
    """
    rows = rows_for(count, columns)
    r = min(max(position[0], 0), rows - 1)
    c = min(max(position[1], 0), columns - 1)
    if r * columns + c >= count:  # only reachable in the last row
        c = (count - 1) % columns
    return (r, c)


def _continuation_field(layout: GridLayout, features: np.ndarray) -> np.ndarray:
    """Feature value per grid cell with the empty tail filled by continuation."""
    grid = layout.grid().copy()
    last_col = (layout.count - 1) % layout.columns
    grid[-1, last_col + 1 :] = grid[-1, last_col]
    return features[grid]


def neighborhood_mean(
    layout: GridLayout, features, position: tuple[int, int], radius: int
) -> np.ndarray:
    """Mean feature over the (2r+1)^2 window centered at position.

    Every sample resolves through clamp_to_shape, so out-of-shape samples
    re-read border cells with multiplicity.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    features = np.asarray(features, dtype=np.float64)
    grid = layout.grid()
    r0, c0 = position
    total = np.zeros(features.shape[1])
    for dr in range(-radius, radius + 1):
        for dc in range(-radius, radius + 1):
            rr, cc = clamp_to_shape((r0 + dr, c0 + dc), layout.count, layout.columns)
            total += features[grid[rr, cc]]
    return total / float((2 * radius + 1) ** 2)


def _target_field(layout: GridLayout, features: np.ndarray, radius: int) -> np.ndarray:
    """neighborhood_mean for every cell at once via a padded summed-area table."""
    values = _continuation_field(layout, features)
    padded = np.pad(values, ((radius, radius), (radius, radius), (0, 0)), mode="edge")
    table = np.zeros(
        (padded.shape[0] + 1, padded.shape[1] + 1, padded.shape[2]), dtype=np.float64
    )
    table[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
    w = 2 * radius + 1
    sums = table[w:, w:] - table[:-w, w:] - table[w:, :-w] + table[:-w, :-w]
    return sums / float(w * w)


def sortedness(layout: GridLayout, features) -> float:
    """Mean L2 distance across horizontally/vertically adjacent occupied cells."""
    features = np.asarray(features, dtype=np.float64)
    grid = layout.grid()
    occupied = grid != EMPTY
    total = 0.0
    pairs = 0
    for a, b, mask in (
        (grid[:, :-1], grid[:, 1:], occupied[:, :-1] & occupied[:, 1:]),
        (grid[:-1, :], grid[1:, :], occupied[:-1, :] & occupied[1:, :]),
    ):
        if mask.any():
            diffs = features[a[mask]] - features[b[mask]]
            total += np.sqrt((diffs * diffs).sum(axis=1)).sum()
            pairs += int(mask.sum())
    return total / pairs if pairs else 0.0


def _initial_layout(count: int, columns: int, config: SortConfig) -> GridLayout:
    rows = rows_for(count, columns)
    order = np.arange(count)
    if config.shuffle:
        order = np.random.default_rng(config.seed).permutation(count)
    cells = np.full(rows * columns, EMPTY, dtype=np.int64)
    cells[:count] = order
    return GridLayout(columns=columns, rows=rows, count=count, cells=cells)


def _block_schedule(columns: int, rows: int) -> list[int]:
    """Largest power of two below max(N, M), halving down to 1."""
    largest = max(columns, rows)
    if largest <= 1:
        return []
    b = 1
    while b * 2 < largest:
        b *= 2
    schedule = []
    while b >= 1:
        schedule.append(b)
        b //= 2
    return schedule


def _run_pass(
    layout: GridLayout,
    features: np.ndarray,
    positions: list[tuple[int, int]],
    block: int,
    radius: int,
    trace: list[PassTrace] | None,
    pass_index: int,
) -> int:
    """One scanline sweep of swap groups against frozen targets.

    Returns the number of applied (strictly improving) permutations. The
    identity permutation is always a candidate and wins ties, so no applied
    permutation ever increases the frozen-target objective.
    """
    n, m, k = layout.columns, layout.rows, layout.count
    targets = _target_field(layout, features, radius).reshape(m * n, -1)
    pass_trace = None
    if trace is not None:
        pass_trace = PassTrace(
            block=block, pass_index=pass_index, radius=radius, targets=targets.copy()
        )
        trace.append(pass_trace)

    cells = layout.cells
    applied = 0
    for r, c in positions:
        group: list[int] = []
        for rr, cc in ((r, c), (r, c + block), (r + block, c), (r + block, c + block)):
            if rr < m and cc < n:
                idx = rr * n + cc
                if idx < k:
                    group.append(idx)
        g = len(group)
        if g < 2:
            continue
        occupants = cells[group]
        feats = features[occupants]
        cell_targets = targets[group]
        # cost[i][j]: occupant j sitting at group cell i
        delta = cell_targets[:, None, :] - feats[None, :, :]
        cost = (delta * delta).sum(axis=2).tolist()
        identity_cost = sum(cost[i][i] for i in range(g))
        best_cost, best_perm = identity_cost, None
        for perm in _GROUP_PERMS[g][1:]:
            total = sum(cost[i][perm[i]] for i in range(g))
            if total < best_cost:
                best_cost, best_perm = total, perm
        if best_perm is not None:
            cells[group] = occupants[list(best_perm)]
            applied += 1
            if pass_trace is not None:
                pass_trace.events.append(
                    SwapEvent(
                        cell_indices=list(group),
                        before=occupants.tolist(),
                        after=cells[group].tolist(),
                    )
                )
    return applied


def _run_schedule(
    feats: np.ndarray,
    columns: int,
    config: SortConfig,
    trace: list[PassTrace] | None,
    on_stage,
) -> tuple[GridLayout, float]:
    """One full halving schedule; returns the best layout seen and its score."""
    count = feats.shape[0]
    layout = _initial_layout(count, columns, config)
    positions = valid_shape(count, columns)

    best_cells = layout.cells.copy()
    best_score = sortedness(layout, feats)

    schedule = _block_schedule(layout.columns, layout.rows)
    for stage, block in enumerate(schedule):
        radius = max(1, int(round(block * config.neighborhood_radius_factor)))
        for pass_index in range(config.passes_per_stage):
            applied = _run_pass(layout, feats, positions, block, radius, trace, pass_index)
            if __debug__:
                layout.validate()
            if applied == 0:
                break
        score = sortedness(layout, feats)
        if score < best_score:
            best_score = score
            best_cells = layout.cells.copy()
        if on_stage is not None:
            on_stage(stage + 1, len(schedule))

    layout.cells = best_cells
    return layout, best_score


def ssm_sort(
    features,
    columns: int,
    config: SortConfig | None = None,
    trace: list[PassTrace] | None = None,
    on_stage=None,
) -> GridLayout:
    """Visually sort K feature vectors onto an N-column grid.

    Block offsets start at the largest power of two below max(N, M) and
    halve each stage. Within a pass, every valid cell spawns a swap group of
    up to four cells; all permutations of the group's occupants are scored
    against frozen neighborhood-mean targets and the best is applied. The
    layout with the lowest sortedness seen after any stage (including the
    starting arrangement) is returned, so the result is never worse than the
    initial placement.

    config.restarts > 1 reruns the schedule from further seeded shuffles and
    keeps the overall best layout; greedy swaps stall in local minima on
    very small grids, and restarts are the cheap way out there. The result
    is deterministic for a fixed (features, columns, config).
    """
    feats = np.ascontiguousarray(features, dtype=np.float64)
    if feats.ndim != 2 or feats.shape[0] < 1:
        raise ValueError(f"expected a K x dim feature matrix with K >= 1, got {feats.shape}")
    if columns < 1:
        raise ValueError("columns must be >= 1")

    config = config or SortConfig()
    best_layout, best_score = _run_schedule(feats, columns, config, trace, on_stage)
    for extra in range(1, config.restarts):
        run_config = replace(config, seed=config.seed + extra, shuffle=True)
        layout, score = _run_schedule(feats, columns, run_config, trace, on_stage)
        if score < best_score:
            best_layout, best_score = layout, score

    best_layout.validate()
    return best_layout
