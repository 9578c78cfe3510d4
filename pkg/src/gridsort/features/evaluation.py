"""Retrieval quality scoring used to tune the descriptor part weights."""

from __future__ import annotations

from collections import Counter

import numpy as np

from ..errors import InsufficientLabels
from .descriptor import WeightProfile, combine_all


def evaluate_map(labeled, profile: WeightProfile) -> float:
    """Leave-one-out mean average precision with same-label relevance.

    Every item queries the remaining corpus, ranked by L2 distance on the
    combined vectors (distance ties keep input order). AP averages the
    precision at each relevant hit; the mean over all queries comes back in
    [0, 1].

    labeled: sequence of (label, Descriptor) pairs.
    """
    labeled = list(labeled)
    labels = [label for label, _ in labeled]
    counts = Counter(labels)
    if len(counts) < 2 or min(counts.values()) < 2:
        raise InsufficientLabels(
            f"need >= 2 labels with >= 2 members each, got {dict(counts)}"
        )

    mat = combine_all((desc for _, desc in labeled), profile)
    lab = np.asarray(labels)
    n = len(lab)
    sq_norms = (mat * mat).sum(axis=1)
    sq_dist = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (mat @ mat.T)

    ap_values = []
    ranks = np.arange(1, n, dtype=np.float64)
    for i in range(n):
        dist = np.delete(sq_dist[i], i)
        relevant = np.delete(lab == lab[i], i)
        order = np.argsort(dist, kind="stable")
        rel_sorted = relevant[order]
        hits = np.cumsum(rel_sorted)
        precisions = hits[rel_sorted] / ranks[rel_sorted]
        ap_values.append(precisions.mean())
    return float(np.mean(ap_values))
