"""Linear compression of raw external embeddings down to 64 dimensions."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DegenerateData, DimensionMismatch

OUTPUT_DIM = 64


@dataclass
class ProjectionModel:
    """Fitted mean + orthonormal row basis mapping raw embeddings to 64 dims."""

    mean: np.ndarray
    basis: np.ndarray
    explained_variance: np.ndarray

    @property
    def input_dim(self) -> int:
        return self.mean.shape[0]

    @property
    def output_dim(self) -> int:
        return self.basis.shape[0]

    def save(self, path: str | Path) -> None:
        np.savez(
            path,
            mean=self.mean,
            basis=self.basis,
            explained_variance=self.explained_variance,
        )

    @classmethod
    def load(cls, path: str | Path) -> "ProjectionModel":
        with np.load(path) as data:
            return cls(
                mean=data["mean"],
                basis=data["basis"],
                explained_variance=data["explained_variance"],
            )


def fit_projection(embeddings, output_dim: int = OUTPUT_DIM) -> ProjectionModel:
    """Principal directions of the centered rows, strongest first.

    Keeps min(output_dim, input_dim) components. When the data has fewer
    independent rows than components, the basis is completed with arbitrary
    orthonormal directions carrying zero explained variance.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError(f"need a K x dim matrix with K >= 2 rows, got shape {x.shape}")
    if np.all(x == x[0]):
        raise DegenerateData("all embedding rows are identical")
    k, dim = x.shape
    out = min(output_dim, dim)
    mean = x.mean(axis=0)
    centered = x - mean
    need_completion = min(k, dim) < out
    _, svals, vt = np.linalg.svd(centered, full_matrices=need_completion)
    variance = np.zeros(out)
    kept = min(svals.shape[0], out)
    variance[:kept] = (svals[:kept] ** 2) / (k - 1)
    return ProjectionModel(mean=mean, basis=vt[:out].copy(), explained_variance=variance)


def project(model: ProjectionModel, embedding, normalize: bool = True) -> np.ndarray:
    """Map one raw embedding through the fitted basis.

    The linear map is distance non-expanding (orthonormal rows). With
    normalize=True the result is scaled to unit length for descriptor
    storage; a zero projection stays zero (degenerate).
    """
    v = np.asarray(embedding, dtype=np.float64)
    if v.shape != (model.input_dim,):
        raise DimensionMismatch(
            f"embedding has shape {v.shape}, model expects ({model.input_dim},)"
        )
    y = model.basis @ (v - model.mean)
    if not normalize:
        return y
    norm = np.linalg.norm(y)
    return y / norm if norm > 0 else y


def project_many(model: ProjectionModel, embeddings, normalize: bool = True) -> np.ndarray:
    x = np.asarray(embeddings, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise DimensionMismatch(
            f"embeddings have shape {x.shape}, model expects (*, {model.input_dim})"
        )
    y = (x - model.mean) @ model.basis.T
    if normalize:
        norms = np.linalg.norm(y, axis=1, keepdims=True)
        np.divide(y, norms, out=y, where=norms > 0)
    return y
