"""Color and edge histogram parts of the visual descriptor."""

from __future__ import annotations

import numpy as np

from .common import as_rgb_array, hellinger_normalize, luma_plane

HUE_BINS = 6
SAT_BINS = 3
VAL_BINS = 3
COLOR_DIM = HUE_BINS * SAT_BINS * VAL_BINS  # 54

ORIENT_BINS = 8
SPATIAL_CELLS = 5  # 2x2 quadrants plus one global cell
EDGE_DIM = SPATIAL_CELLS * ORIENT_BINS  # 40

_TWO_PI = 2.0 * np.pi


def _rgb_to_hsv(rgb: np.ndarray):
    """Vectorized RGB -> HSV using the classic piecewise hue formula.

    Channel ties resolve in r, g, b priority order (same convention as
    colorsys); grey pixels get hue 0.
    """
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = np.max(rgb, axis=-1)
    minc = np.min(rgb, axis=-1)
    delta = maxc - minc
    v = maxc
    s = np.divide(delta, maxc, out=np.zeros_like(maxc), where=maxc > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        rc = (maxc - r) / delta
        gc = (maxc - g) / delta
        bc = (maxc - b) / delta
        h = np.select([r == maxc, g == maxc], [bc - gc, 2.0 + rc - bc], default=4.0 + gc - rc)
    h = np.where(delta > 0, (h / 6.0) % 1.0, 0.0)
    return h, s, v


def color_histogram(pixels) -> np.ndarray:
    """HSV histogram: 6 hue x 3 saturation x 3 value bins, flattened to 54.

    Hue mass splits linearly between the two nearest bin centers (centers at
    i/6, circular), so a hue drifting across a bin border moves smoothly
    instead of jumping. Saturation and value bin hard. The counts are
    Hellinger-mapped into a unit vector.
    """
    rgb = as_rgb_array(pixels).astype(np.float64) / 255.0
    h, s, v = _rgb_to_hsv(rgb)

    t = h * HUE_BINS
    lower = np.floor(t)
    frac = t - lower
    hue0 = lower.astype(np.int64) % HUE_BINS
    hue1 = (hue0 + 1) % HUE_BINS

    s_idx = np.minimum((s * SAT_BINS).astype(np.int64), SAT_BINS - 1)
    v_idx = np.minimum((v * VAL_BINS).astype(np.int64), VAL_BINS - 1)

    flat0 = ((hue0 * SAT_BINS + s_idx) * VAL_BINS + v_idx).ravel()
    flat1 = ((hue1 * SAT_BINS + s_idx) * VAL_BINS + v_idx).ravel()
    counts = np.bincount(flat0, weights=(1.0 - frac).ravel(), minlength=COLOR_DIM)
    counts += np.bincount(flat1, weights=frac.ravel(), minlength=COLOR_DIM)
    return hellinger_normalize(counts)


def edge_histogram(pixels) -> np.ndarray:
    """Gradient-orientation histogram over a 2x2 grid plus a global cell.

    Luma gradients come from central differences (one-sided at borders,
    zero along axes shorter than 2 pixels); each pixel votes its gradient
    magnitude into one of 8 orientation bins. 5 cells x 8 bins = 40,
    Hellinger-mapped. A flat image has no gradients anywhere and yields the
    all-zero degenerate vector.
    """
    luma = luma_plane(pixels)
    rows, cols = luma.shape
    gy = np.gradient(luma, axis=0) if rows >= 2 else np.zeros_like(luma)
    gx = np.gradient(luma, axis=1) if cols >= 2 else np.zeros_like(luma)
    mag = np.hypot(gx, gy)
    theta = np.arctan2(gy, gx)
    bins = np.minimum(
        (np.mod(theta, _TWO_PI) / _TWO_PI * ORIENT_BINS).astype(np.int64),
        ORIENT_BINS - 1,
    )

    ym, xm = rows // 2, cols // 2
    cells = (
        (slice(0, ym), slice(0, xm)),
        (slice(0, ym), slice(xm, cols)),
        (slice(ym, rows), slice(0, xm)),
        (slice(ym, rows), slice(xm, cols)),
        (slice(0, rows), slice(0, cols)),
    )
    hist = np.zeros(EDGE_DIM)
    for i, (ys, xs) in enumerate(cells):
        cell_bins = bins[ys, xs].ravel()
        if cell_bins.size:
            hist[i * ORIENT_BINS : (i + 1) * ORIENT_BINS] = np.bincount(
                cell_bins, weights=mag[ys, xs].ravel(), minlength=ORIENT_BINS
            )
    return hellinger_normalize(hist)
