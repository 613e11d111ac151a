"""Linear subspace learning on similarity graphs.

Two graph-driven linear embeddings plus the 1-NN evaluation used to score
them. The neighborhood-preserving embedding consumes per-point
reconstruction coefficients; the locality-preserving projection consumes a
symmetric affinity graph. Both reduce to a generalized symmetric
eigenproblem whose smallest eigenvectors form the projection columns.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix, identity, spmatrix
from scipy.spatial.distance import cdist

from .data import validate_data_matrix
from .llr import DEGENERATE_TOL, symmetrize


def generalized_sym_eig(
    A: np.ndarray, B: np.ndarray, delta: float = 1e-10
) -> tuple[np.ndarray, np.ndarray]:
    """Solve A v = gamma B v for a symmetric pencil, eigenvalues ascending.

    B gets a trace-relative ridge delta * (trace(B)/m) before factorization;
    eigenvectors are B-orthonormal (v^T B v = 1). The residual contract
    ||A v - gamma B v|| <= 1e-6 * (1 + ||A||) is enforced per solve.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"A and B must be square with matching shape, got {A.shape} and {B.shape}")
    for name, M in (("A", A), ("B", B)):
        if not np.all(np.isfinite(M)):
            raise ValueError(f"{name} contains non-finite entries")
        if np.max(np.abs(M - M.T), initial=0.0) > 1e-10 * (1.0 + np.max(np.abs(M), initial=0.0)):
            raise ValueError(f"{name} is not symmetric")

    m = A.shape[0]
    trace = float(np.trace(B))
    ridge = delta * (trace / m) if trace > 0 else delta
    B_reg = B + ridge * np.eye(m)
    try:
        evals, evecs = scipy.linalg.eigh(A, B_reg)
    except scipy.linalg.LinAlgError as exc:
        raise ValueError(f"B is not positive-definite after regularization: {exc}") from None

    scale = 1.0 + np.max(np.abs(A), initial=0.0)
    residual = np.max(np.abs(A @ evecs - (B_reg @ evecs) * evals), initial=0.0)
    if residual > 1e-6 * scale:
        raise RuntimeError(f"generalized eigensolve residual {residual:.3e} exceeds contract")
    return evals, evecs


def _fix_column_signs(V: np.ndarray) -> np.ndarray:
    for j in range(V.shape[1]):
        anchor = int(np.argmax(np.abs(V[:, j])))
        if V[anchor, j] < 0:
            V[:, j] = -V[:, j]
    return V


def npe_from_graph(
    X: np.ndarray,
    C: spmatrix,
    d: int,
    weights: str = "coefficients",
    delta: float = 1e-10,
) -> np.ndarray:
    """Neighborhood-preserving projection driven by reconstruction coefficients.

    Each retained coefficient row of C is renormalized to sum one, giving a
    row-stochastic weight matrix Wt; with M = (I - Wt)^T (I - Wt), the
    projection columns are the eigenvectors of the d smallest eigenvalues of
    (X^T M X) a = gamma (X^T X) a.

    weights='coefficients' uses the rows of C directly (the derivation's
    reading); weights='symmetrized' substitutes the symmetrized graph
    |C| + |C^T| before renormalization, exposed for experimentation.
    """
    X = validate_data_matrix(X)
    n, m = X.shape
    if C.shape != (n, n):
        raise ValueError(f"coefficient matrix shape {C.shape} does not match n={n}")
    if not 1 <= d <= m:
        raise ValueError(f"d must lie in [1, m={m}], got {d}")
    if weights == "coefficients":
        base = C.tocsr()
    elif weights == "symmetrized":
        base = symmetrize(C)
    else:
        raise ValueError(f"weights must be 'coefficients' or 'symmetrized', got {weights!r}")

    row_sums = np.asarray(base.sum(axis=1)).ravel()
    bad = np.flatnonzero(np.abs(row_sums) < DEGENERATE_TOL)
    if bad.size:
        raise ValueError(f"coefficient rows sum to ~0 for samples {bad.tolist()}; cannot renormalize")
    Wt = csr_matrix(base.multiply(1.0 / row_sums[:, None]))

    I_minus_W = (identity(n, format="csr") - Wt).toarray()
    M = I_minus_W.T @ I_minus_W

    A_mat = X.T @ M @ X
    B_mat = X.T @ X
    A_mat = (A_mat + A_mat.T) / 2.0
    B_mat = (B_mat + B_mat.T) / 2.0

    b_evals = np.linalg.eigvalsh(B_mat)
    rank = int(np.sum(b_evals > np.max(b_evals) * 1e-10))
    if d > rank:
        raise ValueError(f"d={d} exceeds the numerical rank {rank} of the data Gram matrix")

    _, evecs = generalized_sym_eig(A_mat, B_mat, delta)
    return _fix_column_signs(evecs[:, :d].copy())


def lpp_embed(X: np.ndarray, W: spmatrix, d: int, delta: float = 1e-10) -> np.ndarray:
    """Locality-preserving projection from a symmetric affinity graph.

    With degrees D and Laplacian L = D - W, the projection columns are the
    eigenvectors of the d smallest eigenvalues of
    (X^T L X) a = gamma (X^T D X) a.
    """
    X = validate_data_matrix(X)
    n, m = X.shape
    if W.shape != (n, n):
        raise ValueError(f"graph shape {W.shape} does not match n={n}")
    if not 1 <= d <= m:
        raise ValueError(f"d must lie in [1, m={m}], got {d}")
    degrees = np.asarray(W.sum(axis=1)).ravel()
    isolated = np.flatnonzero(degrees <= 0)
    if isolated.size:
        raise ValueError(f"graph has isolated vertices (zero degree): {isolated.tolist()}")

    dense = W.toarray() if hasattr(W, "toarray") else np.asarray(W, dtype=float)
    L = np.diag(degrees) - dense
    A_mat = X.T @ L @ X
    B_mat = (X * degrees[:, None]).T @ X
    A_mat = (A_mat + A_mat.T) / 2.0
    B_mat = (B_mat + B_mat.T) / 2.0

    _, evecs = generalized_sym_eig(A_mat, B_mat, delta)
    return _fix_column_signs(evecs[:, :d].copy())


def transform(P: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Apply a projection: Y = X P (sample-major)."""
    X = validate_data_matrix(X)
    P = np.asarray(P, dtype=float)
    if X.shape[1] != P.shape[0]:
        raise ValueError(f"dimension mismatch: X has {X.shape[1]} columns, P has {P.shape[0]} rows")
    return X @ P


def nn_classify(train: np.ndarray, train_labels: np.ndarray, test: np.ndarray) -> np.ndarray:
    """1-nearest-neighbor labels, ties broken by the smaller training index."""
    train = validate_data_matrix(train, "train")
    test = validate_data_matrix(test, "test")
    train_labels = np.asarray(train_labels)
    if train_labels.shape[0] != train.shape[0]:
        raise ValueError("train_labels length must match train rows")
    if train.shape[1] != test.shape[1]:
        raise ValueError("train and test dimensionality differ")
    nearest = np.argmin(cdist(test, train), axis=1)
    return train_labels[nearest]


def save_projection(path: str | Path, P: np.ndarray) -> None:
    """Write a projection matrix as CSV, m rows by d columns, full precision."""
    P = np.asarray(P, dtype=float)
    lines = [",".join(repr(float(v)) for v in row) for row in P]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_projection(path: str | Path) -> np.ndarray:
    rows = [
        [float(cell) for cell in line.split(",")]
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    return np.asarray(rows, dtype=float)
