"""Dataset ingestion, synthetic unions of subspaces, splitting, and PCA.

Conventions
-----------
- Data matrices are sample-major: shape (n, m), one sample per row.
- All stochastic operations take an explicit 64-bit seed and use
  numpy's PCG64 generator, so results are reproducible bit-for-bit.
- Labels are canonicalized to contiguous integers 0..K-1 in order of
  first appearance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def validate_data_matrix(X: np.ndarray, name: str = "X") -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"{name} must be a 2-D matrix with n >= 1 and m >= 1, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite entries")
    return X


@dataclass
class LabeledDataset:
    """A data matrix with optional per-sample class labels.

    labels, when present, are canonical integers 0..K-1; label_names maps
    the canonical integer back to the original label string.
    """

    X: np.ndarray
    labels: np.ndarray | None = None
    label_names: list[str] | None = None

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        if self.labels is None:
            raise ValueError("dataset has no labels")
        return int(self.labels.max()) + 1 if self.labels.size else 0


@dataclass(frozen=True)
class SyntheticSpec:
    """Configuration for a synthetic union of linear subspaces.

    subspaces is a list of (intrinsic_dim, points_per_subspace) pairs.
    """

    ambient_dim: int
    subspaces: list[tuple[int, int]]
    noise_sigma: float
    seed: int

    def validate(self) -> None:
        if self.ambient_dim < 1:
            raise ValueError("ambient_dim must be >= 1")
        if not self.subspaces:
            raise ValueError("at least one subspace is required")
        for dim, count in self.subspaces:
            if not 1 <= dim <= self.ambient_dim:
                raise ValueError(f"intrinsic_dim {dim} must lie in [1, ambient_dim={self.ambient_dim}]")
            if count < dim + 1:
                raise ValueError(f"points_per_subspace {count} must be >= intrinsic_dim + 1 = {dim + 1}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")


@dataclass
class PcaModel:
    mean: np.ndarray
    basis: np.ndarray  # (m, d), orthonormal columns
    energy_retained: float

    @property
    def d(self) -> int:
        return self.basis.shape[1]


def _canonicalize_labels(raw: list[str]) -> tuple[np.ndarray, list[str]]:
    names: list[str] = []
    index: dict[str, int] = {}
    out = np.empty(len(raw), dtype=np.int64)
    for i, value in enumerate(raw):
        if value not in index:
            index[value] = len(names)
            names.append(value)
        out[i] = index[value]
    return out, names


def load_csv(path: str | Path, label_column: str | int | None = None) -> LabeledDataset:
    """Load a labeled dataset from a CSV file.

    The file may carry a single header row, auto-detected by the first row
    containing any cell that does not parse as a number. label_column
    selects the label column by header name or by 0-based column index.
    Cell positions in error messages are 1-based (file row, column).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")

    with path.open(newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: empty file")

    def _is_number(cell: str) -> bool:
        try:
            float(cell)
        except ValueError:
            return False
        return True

    has_header = not all(_is_number(c) for c in rows[0])
    header = [c.strip() for c in rows[0]] if has_header else None
    data_rows = rows[1:] if has_header else rows
    first_data_line = 2 if has_header else 1
    if not data_rows:
        raise ValueError(f"{path}: no data rows")

    arity = len(data_rows[0])
    for r, row in enumerate(data_rows):
        if len(row) != arity:
            raise ValueError(
                f"{path}: ragged row {first_data_line + r}: expected {arity} cells, got {len(row)}"
            )

    label_idx: int | None = None
    if label_column is not None:
        if isinstance(label_column, int) or (isinstance(label_column, str) and label_column.lstrip("-").isdigit()):
            label_idx = int(label_column)
            if not 0 <= label_idx < arity:
                raise ValueError(f"label column index {label_idx} out of range for {arity} columns")
        else:
            if header is None:
                raise ValueError(f"label column {label_column!r} given by name but file has no header row")
            if label_column not in header:
                raise ValueError(f"label column {label_column!r} not found in header {header}")
            label_idx = header.index(label_column)

    feature_cols = [j for j in range(arity) if j != label_idx]
    if not feature_cols:
        raise ValueError("no feature columns left after removing the label column")

    X = np.empty((len(data_rows), len(feature_cols)), dtype=float)
    raw_labels: list[str] = []
    for r, row in enumerate(data_rows):
        for out_j, j in enumerate(feature_cols):
            cell = row[j].strip()
            try:
                value = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: non-numeric cell at row {first_data_line + r}, column {j + 1}: {cell!r}"
                ) from None
            if not math.isfinite(value):
                raise ValueError(
                    f"{path}: non-finite cell at row {first_data_line + r}, column {j + 1}: {cell!r}"
                )
            X[r, out_j] = value
        if label_idx is not None:
            raw_labels.append(row[label_idx].strip())

    if label_idx is None:
        return LabeledDataset(X=X)
    labels, names = _canonicalize_labels(raw_labels)
    return LabeledDataset(X=X, labels=labels, label_names=names)


def save_csv(path: str | Path, ds: LabeledDataset) -> None:
    """Write a dataset as CSV with a header row; labels go to a 'label' column."""
    path = Path(path)
    m = ds.m
    header = [f"f{j}" for j in range(m)]
    if ds.labels is not None:
        header.append("label")
    lines = [",".join(header)]
    for i in range(ds.n):
        cells = [repr(float(v)) for v in ds.X[i]]
        if ds.labels is not None:
            cells.append(str(int(ds.labels[i])))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def train_test_split(
    ds: LabeledDataset,
    train_fraction: float,
    seed: int,
    stratified: bool = True,
) -> tuple[LabeledDataset, LabeledDataset]:
    """Split a dataset into train and test parts.

    Stratified mode draws ceil(train_fraction * n_c) samples per class c
    without replacement; unstratified mode draws ceil(train_fraction * n)
    samples globally. Indices within each part keep ascending order, and
    the two parts always partition the input exactly.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    rng = _rng(seed)
    n = ds.n

    if stratified:
        if ds.labels is None:
            raise ValueError("stratified split requires labels")
        train_parts = []
        for c in range(ds.n_classes):
            idx_c = np.flatnonzero(ds.labels == c)
            if idx_c.size < 2:
                raise ValueError(f"class {c} has {idx_c.size} sample(s); stratified split needs >= 2")
            take = math.ceil(train_fraction * idx_c.size)
            perm = rng.permutation(idx_c)
            train_parts.append(perm[:take])
        train_idx = np.sort(np.concatenate(train_parts))
    else:
        take = math.ceil(train_fraction * n)
        perm = rng.permutation(n)
        train_idx = np.sort(perm[:take])

    mask = np.zeros(n, dtype=bool)
    mask[train_idx] = True
    test_idx = np.flatnonzero(~mask)

    def _subset(idx: np.ndarray) -> LabeledDataset:
        labels = ds.labels[idx] if ds.labels is not None else None
        return LabeledDataset(X=ds.X[idx].copy(), labels=labels, label_names=ds.label_names)

    return _subset(train_idx), _subset(test_idx)


def _fix_column_signs(V: np.ndarray) -> np.ndarray:
    # Make the largest-magnitude entry of each column positive (ties: first).
    for j in range(V.shape[1]):
        col = V[:, j]
        anchor = int(np.argmax(np.abs(col)))
        if col[anchor] < 0:
            V[:, j] = -col
    return V


def pca_fit(X: np.ndarray, energy: float) -> PcaModel:
    """Fit PCA retaining the smallest dimensionality that reaches `energy`.

    Uses the eigendecomposition of the sample covariance (denominator n-1)
    of mean-centered data. d is the smallest integer such that the top-d
    eigenvalue mass divided by the total is >= energy.
    """
    X = validate_data_matrix(X)
    if not 0.0 < energy <= 1.0:
        raise ValueError(f"energy must lie in (0, 1], got {energy}")
    n = X.shape[0]
    if n < 2:
        raise ValueError("pca_fit needs at least 2 samples")

    mean = X.mean(axis=0)
    Xc = X - mean
    cov = (Xc.T @ Xc) / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    evals = np.maximum(evals[::-1], 0.0)  # descending, clipped tiny negatives
    evecs = evecs[:, ::-1]

    total = float(evals.sum())
    if total <= 0.0:
        raise ValueError("zero total variance: all samples are identical")

    cum = np.cumsum(evals)
    # Relative slack so that energy=1.0 resolves to the numerical rank.
    target = energy * total - 1e-12 * total
    d = int(np.searchsorted(cum, target) + 1)
    d = min(d, evals.size)

    basis = _fix_column_signs(evecs[:, :d].copy())
    return PcaModel(mean=mean, basis=basis, energy_retained=float(cum[d - 1] / total))


def pca_transform(model: PcaModel, X: np.ndarray) -> np.ndarray:
    X = validate_data_matrix(X)
    if X.shape[1] != model.mean.shape[0]:
        raise ValueError(
            f"dimensionality mismatch: X has {X.shape[1]} columns, model expects {model.mean.shape[0]}"
        )
    return (X - model.mean) @ model.basis


def synth_union_of_subspaces(
    spec: SyntheticSpec, return_bases: bool = False
) -> LabeledDataset | tuple[LabeledDataset, list[np.ndarray]]:
    """Generate a labeled union of linear subspaces.

    Per subspace: an orthonormal basis is drawn as the QR factor of a seeded
    Gaussian matrix; coefficient vectors are drawn from the unit Gaussian,
    scaled to unit norm, then uniformly rescaled in [0.5, 1.5] to keep points
    away from the shared origin; isotropic Gaussian noise is added last.
    Labels record the source subspace. Deterministic given spec.seed.
    """
    spec.validate()

    rng = _rng(spec.seed)
    blocks: list[np.ndarray] = []
    labels: list[np.ndarray] = []
    bases: list[np.ndarray] = []
    for s, (dim, count) in enumerate(spec.subspaces):
        G = rng.standard_normal((spec.ambient_dim, dim))
        Q, _ = np.linalg.qr(G)
        basis = Q[:, :dim]
        coeff = rng.standard_normal((count, dim))
        norms = np.linalg.norm(coeff, axis=1)
        norms[norms == 0] = 1.0
        coeff = coeff / norms[:, None]
        scales = rng.uniform(0.5, 1.5, size=count)
        pts = (coeff * scales[:, None]) @ basis.T
        pts = pts + spec.noise_sigma * rng.standard_normal(pts.shape)
        blocks.append(pts)
        labels.append(np.full(count, s, dtype=np.int64))
        bases.append(basis)

    ds = LabeledDataset(
        X=np.vstack(blocks),
        labels=np.concatenate(labels),
        label_names=[str(s) for s in range(len(spec.subspaces))],
    )
    if return_bases:
        return ds, bases
    return ds
