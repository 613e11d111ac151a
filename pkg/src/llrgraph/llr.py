"""Locally linear representation similarity graphs.

Each point x_i is encoded over a dictionary of its d_dict nearest other
points by solving a constrained quadratic that blends a pairwise-distance
penalty with the linear reconstruction residual,

    minimize  lam * ||S c||^2 + (1 - lam) * ||x_i - D c||^2
    subject to  1^T c = 1,

where D holds the dictionary atoms as columns and S is the diagonal matrix
of distances from x_i to each atom. The closed-form minimizer is

    c = M^{-1} 1 / (1^T M^{-1} 1),
    M = lam * S^T S + (1 - lam) * (x_i 1^T - D)^T (x_i 1^T - D).

The coefficient vectors are sparsified to the k_keep strongest entries by
absolute value and symmetrized into a nonnegative similarity graph with
W_ij = |C_ij| + |C_ji|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.spatial.distance import cdist

from .data import validate_data_matrix

#: Row-sum tolerance below which a coefficient normalization is degenerate.
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class HyperParams:
    """Graph construction hyperparameters.

    lam is the distance/representation trade-off in [0, 1); k_keep is the
    number of strongest connections retained per point; d_dict is the
    dictionary size (nearest neighbors used as atoms); epsilon scales the
    trace-relative ridge added to guard singular systems.
    """

    lam: float
    k_keep: int
    d_dict: int
    epsilon: float = 1e-9

    def validate(self, n: int | None = None) -> None:
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lam must lie in [0, 1), got {self.lam}")
        if self.k_keep < 1:
            raise ValueError(f"k_keep must be >= 1, got {self.k_keep}")
        if self.d_dict < 1:
            raise ValueError(f"d_dict must be >= 1, got {self.d_dict}")
        if self.k_keep > self.d_dict:
            raise ValueError(f"k_keep ({self.k_keep}) must not exceed d_dict ({self.d_dict})")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        if n is not None and self.d_dict > n - 1:
            raise ValueError(f"d_dict ({self.d_dict}) must not exceed n - 1 ({n - 1})")


@dataclass
class Dictionary:
    """Dictionary of point `owner`: atom_indices are global sample indices
    (excluding owner), atoms holds the corresponding samples as columns."""

    owner: int
    atom_indices: np.ndarray  # (d_dict,) global indices
    atoms: np.ndarray  # (m, d_dict)


def _nearest_order(dists: np.ndarray, exclude: int) -> np.ndarray:
    # Ascending distance, ties broken by smaller global index; `exclude` last.
    d = dists.copy()
    d[exclude] = np.inf
    return np.lexsort((np.arange(d.size), d))


def build_dictionary(X: np.ndarray, i: int, d_dict: int) -> Dictionary:
    """Collect the d_dict nearest samples to x_i (excluding i) as dictionary atoms.

    Atoms are ordered by ascending Euclidean distance, ties broken by smaller
    global index. d_dict = n-1 yields the full dictionary.
    """
    X = validate_data_matrix(X)
    n = X.shape[0]
    if n < 2:
        raise ValueError("need at least 2 samples to build a dictionary")
    if not 0 <= i < n:
        raise ValueError(f"sample index {i} out of range for n={n}")
    if not 1 <= d_dict <= n - 1:
        raise ValueError(f"d_dict must lie in [1, n-1={n - 1}], got {d_dict}")
    dists = cdist(X[i : i + 1], X)[0]
    order = _nearest_order(dists, exclude=i)[:d_dict]
    return Dictionary(owner=i, atom_indices=order, atoms=X[order].T.copy())


def distance_diagonal(X: np.ndarray, dic: Dictionary) -> np.ndarray:
    """Distances from the owner point to each dictionary atom, in atom order."""
    X = validate_data_matrix(X)
    return np.linalg.norm(X[dic.owner][:, None] - dic.atoms, axis=0)


def _solve_core(x: np.ndarray, atoms: np.ndarray, s: np.ndarray, lam: float, epsilon: float, owner: int) -> np.ndarray:
    d = atoms.shape[1]
    B = x[:, None] - atoms  # column j = x - atom_j
    M = (1.0 - lam) * (B.T @ B)
    M[np.diag_indices(d)] += lam * s**2
    trace = float(np.trace(M))
    ridge = epsilon * (trace / d) if trace > 0 else epsilon
    if ridge > 0:
        M[np.diag_indices(d)] += ridge
    ones = np.ones(d)
    try:
        u = scipy.linalg.solve(M, ones, assume_a="pos")
    except scipy.linalg.LinAlgError as exc:
        raise ValueError(f"degenerate coefficient system for sample {owner}: {exc}") from None
    total = float(u.sum())
    if not np.isfinite(total) or abs(total) < DEGENERATE_TOL:
        raise ValueError(f"degenerate coefficient solution for sample {owner}: 1^T u = {total}")
    return u / total


def solve_coefficients(
    X: np.ndarray, dic: Dictionary, s: np.ndarray, lam: float, epsilon: float = 1e-9
) -> np.ndarray:
    """Solve the constrained quadratic for the coefficients of one point.

    Returns the coefficient vector aligned with dic.atom_indices; it sums to
    one by construction. A trace-relative ridge epsilon * (trace(M)/d_dict)
    (plain epsilon when the trace vanishes) guards singular systems, and the
    system is solved with a symmetric positive-definite factorization.
    """
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"lam must lie in [0, 1), got {lam}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    X = validate_data_matrix(X)
    s = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(s)) or np.any(s < 0):
        raise ValueError("distance diagonal must be finite and nonnegative")
    if s.shape[0] != dic.atoms.shape[1]:
        raise ValueError("distance diagonal length must match dictionary size")
    return _solve_core(X[dic.owner], dic.atoms, s, lam, epsilon, dic.owner)


def sparsify(values: np.ndarray, atom_indices: np.ndarray, k_keep: int) -> tuple[np.ndarray, np.ndarray]:
    """Keep the k_keep entries of largest absolute value (ties: smaller global
    index), drop the rest, and return (global_indices, values) sorted by
    global index. Retained values are not renormalized; exact zeros are not
    stored.
    """
    values = np.asarray(values, dtype=float)
    atom_indices = np.asarray(atom_indices)
    if not 1 <= k_keep <= values.size:
        raise ValueError(f"k_keep must lie in [1, {values.size}], got {k_keep}")
    order = np.lexsort((atom_indices, -np.abs(values)))[:k_keep]
    kept = order[values[order] != 0.0]
    idx = atom_indices[kept]
    out = np.argsort(idx)
    return idx[out], values[kept][out]


def symmetrize(C: csr_matrix) -> csr_matrix:
    """Symmetrize a coefficient matrix into a similarity graph, W_ij = |C_ij| + |C_ji|."""
    if C.shape[0] != C.shape[1]:
        raise ValueError(f"coefficient matrix must be square, got {C.shape}")
    if C.shape[0] and np.any(C.diagonal() != 0):
        raise ValueError("coefficient matrix must have a zero diagonal")
    A = abs(C.tocsr(copy=True))
    W = (A + A.T).tocsr()
    W.sort_indices()
    return W


def build_llr_coefficients(X: np.ndarray, params: HyperParams) -> csr_matrix:
    """Per-point coefficient rows, sparsified and scattered to global indices.

    Row i holds the retained coefficients of point i; the diagonal is zero
    because each point's dictionary excludes the point itself. Rows are
    independent, so the result does not depend on processing order.
    """
    X = validate_data_matrix(X)
    n = X.shape[0]
    params.validate(n)

    dists = cdist(X, X)
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    for i in range(n):
        order = _nearest_order(dists[i], exclude=i)[: params.d_dict]
        s = dists[i, order]
        c = _solve_core(X[i], X[order].T, s, params.lam, params.epsilon, owner=i)
        idx, kept = sparsify(c, order, params.k_keep)
        rows.append(np.full(idx.size, i, dtype=np.int64))
        cols.append(idx.astype(np.int64))
        vals.append(kept)

    C = csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    )
    C.sort_indices()
    return C


def build_llr_graph(X: np.ndarray, params: HyperParams) -> csr_matrix:
    """Construct the similarity graph: solve per-point coefficients over
    nearest-neighbor dictionaries, keep the k_keep strongest per point,
    and symmetrize."""
    return symmetrize(build_llr_coefficients(X, params))
