"""Low-frequency fingerprint from a 2-D DCT of the downscaled luma plane."""

from __future__ import annotations

import numpy as np
from PIL import Image
from scipy.fft import dctn

from .common import luma_plane, unit_or_zero

DCT_GRID = 32

# The 21 lowest-frequency AC coefficients in diagonal-major order: every
# index pair with row+col <= 5 plus the leading pair of the row+col == 6
# diagonal. DC is excluded so flat images come out all-zero.
COEFF_INDICES = tuple((i, s - i) for s in range(1, 7) for i in range(s + 1))[:21]
FREQ_DIM = len(COEFF_INDICES)

_ROWS = np.array([i for i, _ in COEFF_INDICES])
_COLS = np.array([j for _, j in COEFF_INDICES])


def frequency_features(pixels) -> np.ndarray:
    """abs -> log1p -> unit L2 over the selected DCT coefficients.

    Luma is resampled to 32x32 first (skipped when the input already is),
    then transformed with an orthonormal type-II DCT.
    """
    luma = luma_plane(pixels)
    if luma.shape != (DCT_GRID, DCT_GRID):
        img = Image.fromarray(luma.astype(np.float32), mode="F")
        img = img.resize((DCT_GRID, DCT_GRID), Image.Resampling.BILINEAR)
        luma = np.asarray(img, dtype=np.float64)
    block = dctn(luma, type=2, norm="ortho")
    mapped = np.log1p(np.abs(block[_ROWS, _COLS]))
    return unit_or_zero(mapped)
