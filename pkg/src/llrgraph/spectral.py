"""Normalized spectral clustering: symmetric-normalized affinity embedding
with row normalization, followed by restarted k-means."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse import spmatrix


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    restarts: int = 20
    max_iter: int = 300
    tol: float = 1e-8
    seed: int = 0

    def validate(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")


def sym_eig(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending.

    Raises on non-symmetric input and enforces the residual contract
    max|A V - V diag(mu)| <= 1e-8 * (1 + max|A|).
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains non-finite entries")
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-10:
        raise ValueError("matrix is not symmetric within 1e-10")
    evals, evecs = np.linalg.eigh(A)
    scale = 1.0 + np.max(np.abs(A), initial=0.0)
    residual = np.max(np.abs(A @ evecs - evecs * evals), initial=0.0)
    if residual > 1e-8 * scale:
        raise RuntimeError(f"eigendecomposition residual {residual:.3e} exceeds contract")
    return evals, evecs


def normalized_laplacian_embedding(W: spmatrix, k: int) -> np.ndarray:
    """Spectral coordinates from the symmetric-normalized affinity.

    Computes D^{-1/2} W D^{-1/2}, takes the eigenvectors of the k largest
    eigenvalues (columns ordered by descending eigenvalue), and normalizes
    each row to unit length. Rows with norm below 1e-12 are left zero and
    reported through a warning.
    """
    n = W.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, n={n}], got {k}")
    degrees = np.asarray(W.sum(axis=1)).ravel()
    isolated = np.flatnonzero(degrees <= 0)
    if isolated.size:
        raise ValueError(f"graph has isolated vertices (zero degree): {isolated.tolist()}")

    inv_sqrt = 1.0 / np.sqrt(degrees)
    dense = W.toarray() if hasattr(W, "toarray") else np.asarray(W, dtype=float)
    A = inv_sqrt[:, None] * dense * inv_sqrt[None, :]
    _, evecs = sym_eig(A)
    coords = evecs[:, ::-1][:, :k].copy()

    norms = np.linalg.norm(coords, axis=1)
    zero_rows = np.flatnonzero(norms < 1e-12)
    if zero_rows.size:
        warnings.warn(
            f"spectral embedding has numerically zero rows: {zero_rows.tolist()}",
            RuntimeWarning,
            stacklevel=2,
        )
    safe = norms.copy()
    safe[zero_rows] = 1.0
    return coords / safe[:, None]


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centers[0] = points[first]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for t in range(1, k):
        total = float(d2.sum())
        if total > 0:
            probs = d2 / total
            choice = int(rng.choice(n, p=probs))
        else:
            choice = int(rng.integers(n))
        centers[t] = points[choice]
        d2 = np.minimum(d2, np.sum((points - centers[t]) ** 2, axis=1))
    return centers


def _lloyd(points: np.ndarray, centers: np.ndarray, config: KMeansConfig) -> tuple[np.ndarray, float]:
    n, k = points.shape[0], centers.shape[0]
    prev_obj = np.inf
    assign = np.zeros(n, dtype=np.int64)
    for _ in range(config.max_iter):
        d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        assign = np.argmin(d2, axis=1)  # ties resolve to the smaller centroid index

        # Repair empty clusters with the farthest point from its centroid,
        # stealing only from clusters that keep at least one member.
        counts = np.bincount(assign, minlength=k)
        for c in np.flatnonzero(counts == 0):
            own_d2 = d2[np.arange(n), assign]
            eligible = counts[assign] >= 2
            candidates = np.flatnonzero(eligible)
            if candidates.size == 0:
                break
            farthest = candidates[np.argmax(own_d2[candidates])]
            counts[assign[farthest]] -= 1
            assign[farthest] = c
            counts[c] += 1

        new_centers = centers.copy()
        for c in range(k):
            members = assign == c
            if members.any():
                new_centers[c] = points[members].mean(axis=0)
        obj = float(np.sum((points - new_centers[assign]) ** 2))
        # Lloyd objective is non-increasing up to floating-point noise.
        assert obj <= prev_obj + 1e-9 * (1.0 + abs(prev_obj)), "k-means objective increased"
        shift = float(np.max(np.linalg.norm(new_centers - centers, axis=1)))
        centers = new_centers
        prev_obj = obj
        if shift < config.tol:
            break
    return assign, prev_obj


def kmeans(points: np.ndarray, config: KMeansConfig) -> np.ndarray:
    """Restarted k-means++ / Lloyd. Restart r uses seed config.seed + r; the
    restart with the lowest within-cluster sum of squares wins (ties by
    lowest restart index)."""
    points = np.asarray(points, dtype=float)
    config.validate()
    if points.ndim != 2 or points.shape[0] < config.k:
        raise ValueError(f"need at least k={config.k} points, got shape {points.shape}")

    best_labels: np.ndarray | None = None
    best_obj = np.inf
    for r in range(config.restarts):
        rng = _rng(config.seed + r)
        centers = _kmeanspp_init(points, config.k, rng)
        labels, obj = _lloyd(points, centers, config)
        if obj < best_obj:
            best_obj = obj
            best_labels = labels
    assert best_labels is not None
    return best_labels


def spectral_cluster(W: spmatrix, k: int, config: KMeansConfig) -> np.ndarray:
    """Cluster graph vertices: spectral embedding at dimension k, then k-means."""
    coords = normalized_laplacian_embedding(W, k)
    return kmeans(coords, replace(config, k=k))
