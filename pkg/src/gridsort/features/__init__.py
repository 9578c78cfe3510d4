"""Visual descriptor extraction, compression, and weighted combination."""

from __future__ import annotations

import numpy as np

from .common import hellinger_normalize, luma_plane, unit_or_zero
from .descriptor import (
    BASE_DIMS,
    DEFAULT_EMBED_DIM,
    PART_ORDER,
    SEARCH_PROFILE,
    SORT_PROFILE,
    Descriptor,
    WeightProfile,
    combine,
    combine_all,
    combined_dim,
)
from .evaluation import evaluate_map
from .frequency import COEFF_INDICES, DCT_GRID, FREQ_DIM, frequency_features
from .histograms import COLOR_DIM, EDGE_DIM, color_histogram, edge_histogram
from .projection import (
    OUTPUT_DIM,
    ProjectionModel,
    fit_projection,
    project,
    project_many,
)

__all__ = [
    "BASE_DIMS",
    "COEFF_INDICES",
    "COLOR_DIM",
    "DCT_GRID",
    "DEFAULT_EMBED_DIM",
    "EDGE_DIM",
    "FREQ_DIM",
    "OUTPUT_DIM",
    "PART_ORDER",
    "SEARCH_PROFILE",
    "SORT_PROFILE",
    "Descriptor",
    "ProjectionModel",
    "WeightProfile",
    "color_histogram",
    "combine",
    "combine_all",
    "combined_dim",
    "edge_histogram",
    "evaluate_map",
    "extract_descriptor",
    "fit_projection",
    "frequency_features",
    "hellinger_normalize",
    "luma_plane",
    "project",
    "project_many",
    "unit_or_zero",
]


def extract_descriptor(pixels, embed: np.ndarray | None = None) -> Descriptor:
    """Compute the hand-crafted parts for one pixel buffer.

    embed, when given, is an already-projected (unit or zero) embedding
    vector to attach as the fourth part.
    """
    return Descriptor.from_parts(
        color=color_histogram(pixels),
        edge=edge_histogram(pixels),
        freq=frequency_features(pixels),
        embed=embed,
    )
