"""Independent brute-force reference implementations.

Everything here is deliberately written the slow, obvious way (per-pixel
python loops, stdlib math, explicit cosine matrices) so that the fast
package code is checked against a second derivation, not against itself.
"""

from __future__ import annotations

import colorsys
import math
from itertools import permutations

import numpy as np

TWO_PI = 2.0 * math.pi


def hellinger(counts) -> np.ndarray:
    total = sum(counts)
    if total <= 0:
        return np.zeros(len(counts))
    mapped = [math.sqrt(c / total) for c in counts]
    norm = math.sqrt(sum(m * m for m in mapped))
    return np.array([m / norm for m in mapped])


def naive_color_histogram(pixels) -> np.ndarray:
    """Per-pixel colorsys loop with soft hue assignment into 6x3x3 bins."""
    arr = np.asarray(pixels)
    counts = [0.0] * 54
    for row in arr.reshape(-1, 3):
        r, g, b = (float(x) / 255.0 for x in row)
        h, s, v = colorsys.rgb_to_hsv(r, g, b)
        t = h * 6.0
        lower = math.floor(t)
        frac = t - lower
        hue0 = int(lower) % 6
        hue1 = (hue0 + 1) % 6
        s_idx = min(int(s * 3.0), 2)
        v_idx = min(int(v * 3.0), 2)
        counts[(hue0 * 3 + s_idx) * 3 + v_idx] += 1.0 - frac
        counts[(hue1 * 3 + s_idx) * 3 + v_idx] += frac
    return hellinger(counts)


def naive_edge_histogram(pixels) -> np.ndarray:
    """Per-pixel accumulation with explicit central/one-sided differences."""
    arr = np.asarray(pixels).astype(float)
    height, width = arr.shape[0], arr.shape[1]
    luma = [
        [
            0.299 * arr[y][x][0] + 0.587 * arr[y][x][1] + 0.114 * arr[y][x][2]
            for x in range(width)
        ]
        for y in range(height)
    ]

    def grad_y(y, x):
        if height < 2:
            return 0.0
        if y == 0:
            return luma[1][x] - luma[0][x]
        if y == height - 1:
            return luma[height - 1][x] - luma[height - 2][x]
        return (luma[y + 1][x] - luma[y - 1][x]) / 2.0

    def grad_x(y, x):
        if width < 2:
            return 0.0
        if x == 0:
            return luma[y][1] - luma[y][0]
        if x == width - 1:
            return luma[y][width - 1] - luma[y][width - 2]
        return (luma[y][x + 1] - luma[y][x - 1]) / 2.0

    hist = [0.0] * 40
    y_mid, x_mid = height // 2, width // 2
    for y in range(height):
        for x in range(width):
            gx, gy = grad_x(y, x), grad_y(y, x)
            mag = math.hypot(gx, gy)
            theta = math.atan2(gy, gx) % TWO_PI
            ob = min(int(theta / TWO_PI * 8.0), 7)
            if y < y_mid and x < x_mid:
                quadrant = 0
            elif y < y_mid:
                quadrant = 1
            elif x < x_mid:
                quadrant = 2
            else:
                quadrant = 3
            hist[quadrant * 8 + ob] += mag
            hist[32 + ob] += mag  # global cell
    return hellinger(hist)


def dct2_basis(n: int) -> np.ndarray:
    """Orthonormal type-II DCT as an explicit cosine matrix."""
    mat = np.zeros((n, n))
    for u in range(n):
        alpha = math.sqrt(1.0 / n) if u == 0 else math.sqrt(2.0 / n)
        for x in range(n):
            mat[u, x] = alpha * math.cos(math.pi * (2 * x + 1) * u / (2.0 * n))
    return mat


def naive_frequency_features(pixels) -> np.ndarray:
    """Matrix-product DCT on a 32x32 input, own coefficient selection."""
    arr = np.asarray(pixels).astype(float)
    assert arr.shape[:2] == (32, 32), "oracle expects 32x32 input (no resize path)"
    luma = 0.299 * arr[..., 0] + 0.587 * arr[..., 1] + 0.114 * arr[..., 2]
    basis = dct2_basis(32)
    block = basis @ luma @ basis.T
    selected = []
    for diag in range(1, 7):
        for i in range(diag + 1):
            selected.append((i, diag - i))
    selected = selected[:21]
    vals = [math.log1p(abs(block[i][j])) for i, j in selected]
    norm = math.sqrt(sum(v * v for v in vals))
    if norm == 0:
        return np.zeros(21)
    return np.array([v / norm for v in vals])


def pca_eigen_oracle(rows):
    """Eigendecomposition of the sample covariance, eigenvalues descending."""
    x = np.asarray(rows, dtype=float)
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (len(x) - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    return evals[order], evecs[:, order]


def brute_force_rank(query_ids, scope_ids, vectors):
    """Double loop over python floats: min distance to any query, sorted."""
    candidates = list(dict.fromkeys(list(scope_ids) + list(query_ids)))
    rows = []
    for cid in candidates:
        best = None
        for qid in query_ids:
            dist = math.dist(vectors[cid], vectors[qid])
            if best is None or dist < best:
                best = dist
        rows.append((cid, best))
    rows.sort(key=lambda item: (item[1], item[0]))
    return rows


def naive_average_precision(relevance_in_rank_order) -> float:
    hits = 0
    precisions = []
    for position, relevant in enumerate(relevance_in_rank_order, start=1):
        if relevant:
            hits += 1
            precisions.append(hits / position)
    return sum(precisions) / len(precisions)


def expected_ap_random(n: int, r: int) -> float:
    """Exact E[AP] for r relevant among n under a uniform random ranking.

    Position t holds a relevant item with probability r/n; conditioned on
    that, the earlier-relevant count is hypergeometric with mean
    (t-1)(r-1)/(n-1), and AP is linear in it.
    """
    total = 0.0
    for t in range(1, n + 1):
        mean_before = (t - 1) * (r - 1) / (n - 1) if n > 1 else 0.0
        total += (1.0 + mean_before) / t
    return total / n


def enumerate_neighborhood_mean(cells_grid, feats, valid_positions, position, radius):
    """Window mean with clamping re-derived from valid-set membership."""
    valid = set(valid_positions)
    rows = len(cells_grid)
    cols = len(cells_grid[0])
    total = np.zeros(np.asarray(feats).shape[1])
    count = 0
    for dr in range(-radius, radius + 1):
        for dc in range(-radius, radius + 1):
            r = min(max(position[0] + dr, 0), rows - 1)
            c = min(max(position[1] + dc, 0), cols - 1)
            while (r, c) not in valid:
                c -= 1  # step towards the last occupied cell of the row
            total += np.asarray(feats)[cells_grid[r][c]]
            count += 1
    return total / count


def scanline_adjacent_mean_distance(order, feats, columns) -> float:
    """Sortedness of a permutation laid out in scanline order, from scratch."""
    k = len(order)
    total = 0.0
    pairs = 0
    for idx in range(k):
        col = idx % columns
        right = idx + 1
        if col + 1 < columns and right < k:
            total += math.dist(feats[order[idx]], feats[order[right]])
            pairs += 1
        down = idx + columns
        if down < k:
            total += math.dist(feats[order[idx]], feats[order[down]])
            pairs += 1
    return total / pairs if pairs else 0.0


def exhaustive_min_sortedness(feats, columns) -> float:
    """Best achievable sortedness over every permutation (small K only)."""
    k = len(feats)
    best = None
    for perm in permutations(range(k)):
        score = scanline_adjacent_mean_distance(perm, feats, columns)
        if best is None or score < best:
            best = score
    return best
