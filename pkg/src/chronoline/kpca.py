"""Cosine-kernel kernel PCA fitted on time anchors.

Training projections follow the sqrt(lambda)*u convention; new points are
mapped through the double-centered kernel row divided by sqrt(lambda), so
transforming a training vector reproduces its training projection. The sign
of each component is arbitrary (an eigenvector sign flip), so downstream
code must only rely on sign-invariant quantities.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ChronolineError
from .store import EmbeddingSet, TimeAnchorSet

# Relative eigenvalue cutoff: components with lambda <= EPS * lambda_max are
# numerically degenerate and get dropped.
_EIG_EPS = 1e-10


@dataclass(frozen=True)
class Projector:
    training_vectors: np.ndarray  # (M, N), rows in ascending-year order
    kernel: str                   # only "cosine"
    eigvals: np.ndarray           # (S,), strictly positive, non-increasing
    eigvecs: np.ndarray           # (M, S), orthonormal columns
    s_dim: int
    row_mean: np.ndarray          # (M,) per-row mean of the training kernel
    total_mean: float

    @cached_property
    def _train_unit(self) -> np.ndarray:
        norms = np.linalg.norm(self.training_vectors, axis=1, keepdims=True)
        return self.training_vectors / norms

    @cached_property
    def training_projection(self) -> np.ndarray:
        """(M, S) projections of the training anchors: sqrt(lambda_k)*u_k."""
        return self.eigvecs * np.sqrt(self.eigvals)

    @property
    def input_dim(self) -> int:
        return self.training_vectors.shape[1]


def _cosine_kernel(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    an = a / np.linalg.norm(a, axis=1, keepdims=True)
    bn = b / np.linalg.norm(b, axis=1, keepdims=True)
    return an @ bn.T


def fit(anchors: TimeAnchorSet, s_dim: int) -> Projector:
    """Eigendecompose the double-centered cosine kernel of the anchors.

    Keeps the top s_dim eigenpairs, dropping any whose eigenvalue falls
    below 1e-10 of the largest (with a warning when that shrinks S).
    """
    x = anchors.matrix()
    m = x.shape[0]
    if s_dim < 1:
        raise ChronolineError(f"s_dim must be >= 1, got {s_dim}")
    if s_dim > m:
        raise ChronolineError(f"s_dim {s_dim} exceeds number of anchors {m}")

    k = _cosine_kernel(x, x)
    k = 0.5 * (k + k.T)  # symmetrize away roundoff
    row_mean = k.mean(axis=0)
    total_mean = float(k.mean())
    kc = k - row_mean[np.newaxis, :] - row_mean[:, np.newaxis] + total_mean

    eigvals, eigvecs = np.linalg.eigh(kc)
    eigvals = eigvals[::-1][:s_dim]
    eigvecs = eigvecs[:, ::-1][:, :s_dim]

    lam_max = float(eigvals[0]) if eigvals.size else 0.0
    keep = eigvals > max(lam_max, 0.0) * _EIG_EPS
    if lam_max <= 0.0 or not np.any(keep):
        raise ChronolineError("all eigenvalues below threshold; kernel is degenerate")
    if not np.all(keep):
        effective = int(np.sum(keep))
        warnings.warn(
            f"kpca: only {effective} of {s_dim} requested components are "
            f"numerically significant; reducing S to {effective}",
            stacklevel=2,
        )
        eigvals = eigvals[keep]
        eigvecs = eigvecs[:, keep]

    return Projector(
        training_vectors=x,
        kernel="cosine",
        eigvals=np.ascontiguousarray(eigvals),
        eigvecs=np.ascontiguousarray(eigvecs),
        s_dim=int(eigvals.size),
        row_mean=row_mean,
        total_mean=total_mean,
    )


def transform(proj: Projector, x: np.ndarray) -> np.ndarray:
    """Project one vector into the fitted S-dimensional subspace."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (proj.input_dim,):
        raise ChronolineError(
            f"vector dim {x.shape} does not match training dim {proj.input_dim}"
        )
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise ChronolineError("cannot project a zero vector")
    k = proj._train_unit @ (x / norm)
    k_centered = k - k.mean() - proj.row_mean + proj.total_mean
    return (k_centered @ proj.eigvecs) / np.sqrt(proj.eigvals)


def project_all(proj: Projector, embeddings: EmbeddingSet) -> np.ndarray:
    """transform() row by row; returns an (n_records, S) matrix."""
    if len(embeddings) == 0:
        return np.empty((0, proj.s_dim))
    return np.stack([transform(proj, rec.vec) for rec in embeddings])
