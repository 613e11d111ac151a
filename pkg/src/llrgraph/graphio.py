"""On-disk formats: sparse symmetric graphs and label vectors.

Graph format, one file per graph:

    llr-graph v1 n=<n> sym=1
    <i> <j> <weight>
    ...

with 0-based indices, i < j, full-precision decimal weights, lines sorted
by (i, j). Only one triangle is stored; readers mirror it.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix, spmatrix, triu

_HEADER_RE = re.compile(r"^llr-graph v1 n=(\d+) sym=1$")


def write_graph(path: str | Path, W: spmatrix) -> None:
    if W.shape[0] != W.shape[1]:
        raise ValueError(f"graph must be square, got {W.shape}")
    n = W.shape[0]
    upper = triu(W.tocoo(), k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    lines = [f"llr-graph v1 n={n} sym=1"]
    for i, j, w in zip(upper.row[order], upper.col[order], upper.data[order]):
        lines.append(f"{i} {j} {float(w)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_graph(path: str | Path) -> csr_matrix:
    path = Path(path)
    text = path.read_text(encoding="utf-8").splitlines()
    if not text:
        raise ValueError(f"{path}: empty graph file")
    match = _HEADER_RE.match(text[0].strip())
    if not match:
        raise ValueError(f"{path}: bad graph header {text[0]!r}")
    n = int(match.group(1))
    rows, cols, vals = [], [], []
    for lineno, line in enumerate(text[1:], start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'i j w', got {line!r}")
        i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        if not 0 <= i < j < n:
            raise ValueError(f"{path}:{lineno}: indices must satisfy 0 <= i < j < n={n}")
        rows += [i, j]
        cols += [j, i]
        vals += [w, w]
    W = csr_matrix((vals, (rows, cols)), shape=(n, n))
    W.sort_indices()
    return W


def write_labels(path: str | Path, labels: np.ndarray) -> None:
    Path(path).write_text("".join(f"{int(v)}\n" for v in labels), encoding="utf-8")


def read_labels(path: str | Path) -> np.ndarray:
    lines = [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines()]
    return np.asarray([int(line) for line in lines if line], dtype=np.int64)
