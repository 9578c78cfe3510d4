"""Small shared helpers for the descriptor extractors."""

from __future__ import annotations

import numpy as np

# ITU-R BT.601 luma coefficients.
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def as_rgb_array(pixels) -> np.ndarray:
    arr = np.asarray(pixels)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"expected a nonempty rows x cols x RGB buffer, got shape {arr.shape}")
    return arr


def luma_plane(pixels) -> np.ndarray:
    """Weighted RGB average in the 0..255 range, float64."""
    return as_rgb_array(pixels).astype(np.float64) @ LUMA_WEIGHTS


def hellinger_normalize(counts: np.ndarray) -> np.ndarray:
    """L1-normalize, take square roots, then L2-normalize.

    Euclidean distance on the result behaves like the Hellinger distance on
    the underlying count distributions. All-zero input stays all-zero
    (degenerate) instead of being renormalized.
    """
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0.0:
        return np.zeros_like(counts)
    mapped = np.sqrt(counts / total)
    return mapped / np.linalg.norm(mapped)


def unit_or_zero(vec: np.ndarray) -> np.ndarray:
    """L2-normalize; the zero vector passes through unchanged."""
    vec = np.asarray(vec, dtype=np.float64)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        return np.zeros_like(vec)
    return vec / norm
