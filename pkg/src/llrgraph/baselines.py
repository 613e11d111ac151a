"""Comparison graphs: heat-kernel k-NN affinity and LLE reconstruction weights."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.spatial.distance import cdist

from .data import validate_data_matrix
from .llr import HyperParams, build_llr_graph


@dataclass(frozen=True)
class HeatKernelParams:
    k_nn: int
    sigma: float | str = "auto"  # 'auto' uses the median retained distance

    def validate(self, n: int | None = None) -> None:
        if self.k_nn < 1:
            raise ValueError(f"k_nn must be >= 1, got {self.k_nn}")
        if n is not None and self.k_nn > n - 1:
            raise ValueError(f"k_nn ({self.k_nn}) must not exceed n - 1 ({n - 1})")
        if isinstance(self.sigma, str):
            if self.sigma != "auto":
                raise ValueError(f"sigma must be a positive number or 'auto', got {self.sigma!r}")
        elif not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def heat_kernel_graph(X: np.ndarray, params: HeatKernelParams) -> csr_matrix:
    """Union-kNN graph with heat-kernel weights exp(-d^2 / (2 sigma^2)).

    An edge (i, j) is retained when j is among the k_nn nearest neighbors of
    i or vice versa, which makes the graph symmetric by construction. With
    sigma='auto', sigma is the median distance over retained edges.
    """
    X = validate_data_matrix(X)
    n = X.shape[0]
    params.validate(n)

    dists = cdist(X, X)
    d = dists.copy()
    np.fill_diagonal(d, np.inf)
    # k_nn nearest per row, ties broken by smaller global index.
    col_idx = np.arange(n)
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        order = np.lexsort((col_idx, d[i]))[: params.k_nn]
        adj[i, order] = True
    edges = adj | adj.T

    iu, ju = np.nonzero(np.triu(edges, k=1))
    if isinstance(params.sigma, str):
        retained = dists[iu, ju]
        sigma = float(np.median(retained))
        if sigma <= 0:
            raise ValueError("auto sigma failed: median retained distance is zero")
    else:
        sigma = float(params.sigma)

    weights = np.exp(-(dists[iu, ju] ** 2) / (2.0 * sigma**2))
    rows = np.concatenate([iu, ju])
    cols = np.concatenate([ju, iu])
    data = np.concatenate([weights, weights])
    W = csr_matrix((data, (rows, cols)), shape=(n, n))
    W.sort_indices()
    return W


def lle_graph(X: np.ndarray, k_nn: int, epsilon: float = 1e-9) -> csr_matrix:
    """LLE reconstruction-weight graph: the lam = 0 special case of the
    locally linear representation graph with a k_nn-atom dictionary and all
    coefficients kept."""
    return build_llr_graph(X, HyperParams(lam=0.0, k_keep=k_nn, d_dict=k_nn, epsilon=epsilon))
