"""Per-image descriptor assembly and weighted part combination."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frequency import FREQ_DIM
from .histograms import COLOR_DIM, EDGE_DIM

PART_ORDER = ("color", "edge", "freq", "embed")
BASE_DIMS = {"color": COLOR_DIM, "edge": EDGE_DIM, "freq": FREQ_DIM}
DEFAULT_EMBED_DIM = 64


@dataclass(eq=False)
class Descriptor:
    """Named unit-norm feature parts of one image.

    The embed part (compressed external embedding) is optional. A part that
    came out all-zero (e.g. the edge histogram of a flat image) is kept as
    zeros and flagged degenerate; it contributes zero distance everywhere
    instead of being renormalized.
    """

    parts: dict[str, np.ndarray]
    degenerate: frozenset[str] = frozenset()

    @classmethod
    def from_parts(
        cls,
        color: np.ndarray,
        edge: np.ndarray,
        freq: np.ndarray,
        embed: np.ndarray | None = None,
    ) -> "Descriptor":
        parts: dict[str, np.ndarray] = {}
        for name, vec in (("color", color), ("edge", edge), ("freq", freq), ("embed", embed)):
            if vec is None:
                continue
            vec = np.asarray(vec, dtype=np.float64)
            expected = BASE_DIMS.get(name)
            if expected is not None and vec.shape != (expected,):
                raise ValueError(f"part {name!r} must have dim {expected}, got {vec.shape}")
            parts[name] = vec
        degenerate = frozenset(
            name for name, vec in parts.items() if not np.any(vec)
        )
        return cls(parts=parts, degenerate=degenerate)

    @property
    def embed_dim(self) -> int | None:
        vec = self.parts.get("embed")
        return None if vec is None else vec.shape[0]

    def validate(self, tol: float = 1e-6) -> None:
        """Check the unit-norm-or-degenerate invariant on every part."""
        for name, vec in self.parts.items():
            norm = np.linalg.norm(vec)
            if name in self.degenerate:
                if norm != 0.0:
                    raise ValueError(f"degenerate part {name!r} is not all-zero")
            elif abs(norm - 1.0) > tol:
                raise ValueError(f"part {name!r} has norm {norm}, expected 1 +- {tol}")

    def same_as(self, other: "Descriptor") -> bool:
        """Bit-exact equality, used by cache round-trip checks."""
        if set(self.parts) != set(other.parts) or self.degenerate != other.degenerate:
            return False
        return all(np.array_equal(self.parts[k], other.parts[k]) for k in self.parts)


@dataclass(frozen=True)
class WeightProfile:
    """Nonnegative per-part weights; normalized to sum 1 before use."""

    w_embed: float
    w_color: float
    w_edge: float
    w_freq: float
    purpose: str = "search"

    def __post_init__(self):
        vals = (self.w_embed, self.w_color, self.w_edge, self.w_freq)
        if any(w < 0 for w in vals):
            raise ValueError(f"weights must be >= 0, got {vals}")
        if sum(vals) <= 0:
            raise ValueError("at least one weight must be positive")

    def weights(self) -> dict[str, float]:
        """Normalized weight per part name, summing to 1."""
        raw = {
            "color": self.w_color,
            "edge": self.w_edge,
            "freq": self.w_freq,
            "embed": self.w_embed,
        }
        total = sum(raw.values())
        return {name: w / total for name, w in raw.items()}

    def normalized(self) -> "WeightProfile":
        w = self.weights()
        return WeightProfile(w["embed"], w["color"], w["edge"], w["freq"], self.purpose)


# Embeddings dominate when ranking by content; color pulls more weight when
# arranging thumbnails, where palette drives the perceived order.
SEARCH_PROFILE = WeightProfile(w_embed=0.70, w_color=0.15, w_edge=0.10, w_freq=0.05, purpose="search")
SORT_PROFILE = WeightProfile(w_embed=0.40, w_color=0.40, w_edge=0.10, w_freq=0.10, purpose="sort")


def combined_dim(embed_dim: int = DEFAULT_EMBED_DIM) -> int:
    return COLOR_DIM + EDGE_DIM + FREQ_DIM + embed_dim


def combine(
    descriptor: Descriptor,
    profile: WeightProfile,
    embed_dim: int | None = None,
) -> np.ndarray:
    """Concatenate sqrt-weighted parts into one comparison vector.

    Squared L2 distance on the output equals the weighted sum of per-part
    squared distances, and the output's squared norm is the weight total of
    the non-degenerate parts. When the descriptor has no embed part, its
    weight spreads proportionally over the remaining parts and the embed
    slot is zero-filled so output width stays constant across a corpus
    (pass embed_dim explicitly for mixed corpora).
    """
    weights = profile.weights()
    embed_vec = descriptor.parts.get("embed")
    if embed_dim is None:
        embed_dim = DEFAULT_EMBED_DIM if embed_vec is None else embed_vec.shape[0]
    elif embed_vec is not None and embed_vec.shape[0] != embed_dim:
        raise ValueError(
            f"descriptor embed dim {embed_vec.shape[0]} != corpus embed dim {embed_dim}"
        )

    if embed_vec is None and weights["embed"] > 0:
        rest = weights["color"] + weights["edge"] + weights["freq"]
        if rest > 0:
            factor = 1.0 / rest
            for name in ("color", "edge", "freq"):
                weights[name] *= factor
        weights["embed"] = 0.0

    segments = []
    for name in PART_ORDER:
        dim = BASE_DIMS.get(name, embed_dim)
        vec = descriptor.parts.get(name)
        if vec is None:
            segments.append(np.zeros(dim))
        else:
            segments.append(math.sqrt(weights[name]) * vec)
    return np.concatenate(segments)


def combine_all(descriptors, profile: WeightProfile) -> np.ndarray:
    """Stack combined vectors for a corpus, with one shared embed width."""
    descriptors = list(descriptors)
    embed_dim = next(
        (d.embed_dim for d in descriptors if d.embed_dim is not None),
        DEFAULT_EMBED_DIM,
    )
    return np.stack([combine(d, profile, embed_dim=embed_dim) for d in descriptors])
