"""Pipelines composing data, graphs, clustering and embeddings.

These functions are the single implementation behind the command line
interface; tests drive them directly so CLI runs and library runs cannot
drift apart.
"""

from __future__ import annotations

from typing import Any

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from .baselines import HeatKernelParams, heat_kernel_graph, lle_graph
from .data import (
    LabeledDataset,
    SyntheticSpec,
    pca_fit,
    pca_transform,
    synth_union_of_subspaces,
    train_test_split,
)
from .embedding import lpp_embed, nn_classify, npe_from_graph, transform
from .llr import (
    HyperParams,
    _nearest_order,
    _solve_core,
    build_llr_coefficients,
    build_llr_graph,
    sparsify,
    symmetrize,
)
from .metrics import clustering_accuracy, intra_class_edge_mass, nmi
from .spectral import KMeansConfig, spectral_cluster

DEFAULT_D_DICT_CAP = 300


def resolve_d_dict(requested: int | None, n: int) -> int:
    """Dictionary size to use for n samples; None selects min(cap, n - 1)."""
    if requested is None:
        return min(DEFAULT_D_DICT_CAP, n - 1)
    return requested


def preset_spec(name: str, per_subspace: int, noise_sigma: float, seed: int) -> SyntheticSpec:
    """Named synthetic configurations.

    "fig1" is three subspaces of dimensions 1, 1 and 2 in ambient dimension 3.
    """
    if name == "fig1":
        return SyntheticSpec(
            ambient_dim=3,
            subspaces=[(1, per_subspace), (1, per_subspace), (2, per_subspace)],
            noise_sigma=noise_sigma,
            seed=seed,
        )
    raise ValueError(f"unknown preset {name!r}")


def build_graph_by_method(
    X: np.ndarray,
    method: str,
    *,
    lam: float = 0.5,
    k_keep: int = 8,
    d_dict: int | None = None,
    epsilon: float = 1e-9,
    k_nn: int = 8,
    sigma: float | str = "auto",
) -> sp.csr_matrix:
    """Build a symmetric similarity graph with one of the supported methods."""
    n = X.shape[0]
    if method == "llr":
        params = HyperParams(lam=lam, k_keep=k_keep, d_dict=resolve_d_dict(d_dict, n), epsilon=epsilon)
        return build_llr_graph(X, params)
    if method == "heat":
        return heat_kernel_graph(X, HeatKernelParams(k_nn=k_nn, sigma=sigma))
    if method == "lle":
        return lle_graph(X, k_nn=k_nn, epsilon=epsilon)
    raise ValueError(f"unknown graph method {method!r}")


def llr_graph_family(
    X: np.ndarray,
    lam: float,
    d_dict: int,
    epsilon: float,
    k_keeps: list[int],
) -> dict[int, sp.csr_matrix]:
    """LLR graphs for several k_keep values sharing one pass of solves.

    The coefficient vectors depend on lam and the dictionary but not on
    k_keep, so sweeps over retention levels reuse the per-point solutions.
    Output is bit-identical to calling build_llr_graph per k_keep.
    """
    params = HyperParams(lam=lam, k_keep=max(k_keeps), d_dict=d_dict, epsilon=epsilon)
    params.validate(X.shape[0])
    for k in k_keeps:
        if not 1 <= k <= params.d_dict:
            raise ValueError(f"k_keep {k} must lie in [1, d_dict={params.d_dict}]")

    n = X.shape[0]
    dists = cdist(X, X)
    rows: dict[int, list[np.ndarray]] = {k: [] for k in k_keeps}
    cols: dict[int, list[np.ndarray]] = {k: [] for k in k_keeps}
    vals: dict[int, list[np.ndarray]] = {k: [] for k in k_keeps}
    for i in range(n):
        order = _nearest_order(dists[i], exclude=i)[: params.d_dict]
        s = dists[i, order]
        c = _solve_core(X[i], X[order].T, s, params.lam, params.epsilon, owner=i)
        for k in k_keeps:
            kept_idx, kept_val = sparsify(c, order, k)
            rows[k].append(np.full(kept_idx.size, i, dtype=np.int64))
            cols[k].append(kept_idx.astype(np.int64))
            vals[k].append(kept_val)

    out: dict[int, sp.csr_matrix] = {}
    for k in k_keeps:
        C = sp.csr_matrix(
            (np.concatenate(vals[k]), (np.concatenate(rows[k]), np.concatenate(cols[k]))),
            shape=(n, n),
        )
        C.sort_indices()
        out[k] = symmetrize(C)
    return out


def cluster_graph(W: sp.csr_matrix, k: int, restarts: int, seed: int) -> np.ndarray:
    """Spectral clustering of a prebuilt similarity graph."""
    return spectral_cluster(W, k, KMeansConfig(k=k, restarts=restarts, seed=seed))


def evaluate_clustering(
    pred: np.ndarray, truth: np.ndarray, W: sp.csr_matrix | None = None
) -> dict[str, float]:
    """AC and NMI against ground truth, plus graph intra-class mass if given."""
    out = {
        "ac": clustering_accuracy(pred, truth),
        "nmi": nmi(pred, truth),
    }
    if W is not None:
        out["intra_class_edge_mass"] = intra_class_edge_mass(W, truth)
    return out


def classify_run(
    ds: LabeledDataset,
    *,
    method: str,
    embed_dim: int,
    train_fraction: float = 0.5,
    pca_energy: float | None = 0.98,
    seed: int = 0,
    stratified: bool = True,
    lam: float = 0.5,
    k_keep: int = 8,
    d_dict: int | None = None,
    epsilon: float = 1e-9,
    k_nn: int = 8,
    sigma: float | str = "auto",
    npe_weights: str = "coefficients",
) -> dict[str, Any]:
    """Split, reduce, learn a linear embedding on train, classify test by 1-NN.

    Train data is optionally PCA-reduced (fit on train only); the projection
    is learned from the train graph and applied to both splits before nearest
    neighbour classification. Returns metrics plus the learned projection.
    """
    if ds.labels is None:
        raise ValueError("embedding evaluation requires labels")
    train, test = train_test_split(ds, train_fraction, seed=seed, stratified=stratified)

    if pca_energy is not None:
        model = pca_fit(train.X, energy=pca_energy)
        Xtr = pca_transform(model, train.X)
        Xte = pca_transform(model, test.X)
        pca_dim = model.d
    else:
        Xtr, Xte = train.X, test.X
        pca_dim = Xtr.shape[1]

    if embed_dim > pca_dim:
        raise ValueError(f"embed_dim {embed_dim} exceeds available dimension {pca_dim} after PCA")

    if method == "npe":
        params = HyperParams(
            lam=lam, k_keep=k_keep, d_dict=resolve_d_dict(d_dict, Xtr.shape[0]), epsilon=epsilon
        )
        C = build_llr_coefficients(Xtr, params)
        P = npe_from_graph(Xtr, C, embed_dim, weights=npe_weights)
    elif method == "lpp":
        W = heat_kernel_graph(Xtr, HeatKernelParams(k_nn=k_nn, sigma=sigma))
        P = lpp_embed(Xtr, W, embed_dim)
    else:
        raise ValueError(f"unknown embedding method {method!r}")

    Ytr = transform(P, Xtr)
    Yte = transform(P, Xte)
    pred = nn_classify(Ytr, train.labels, Yte)
    acc = float(np.mean(pred == test.labels))

    return {
        "accuracy": acc,
        "n_train": train.n,
        "n_test": test.n,
        "pca_dim": pca_dim,
        "embed_dim": embed_dim,
        "projection": P,
        "pred": pred,
        "test_labels": test.labels,
    }


def _cluster_cell(
    W: sp.csr_matrix,
    truth: np.ndarray,
    n_clusters: int,
    restarts: int,
    seed: int,
) -> dict[str, float]:
    pred = cluster_graph(W, n_clusters, restarts, seed)
    return evaluate_clustering(pred, truth, W)


def sweep_run(
    *,
    dataset: LabeledDataset | None = None,
    preset: str | None = None,
    per_subspace: int = 50,
    noise_sigma: float = 0.01,
    n_clusters: int,
    methods: list[str],
    lambdas: list[float],
    k_values: list[int],
    seeds: list[int],
    d_dict: int | None = None,
    epsilon: float = 1e-9,
    sigma: float | str = "auto",
    restarts: int = 20,
) -> dict[str, Any]:
    """Grid evaluation of graph methods under spectral clustering.

    For preset data each seed regenerates the dataset and seeds k-means;
    for a fixed input dataset the seed only drives k-means. The LLR grid is
    lambdas x k_values; heat and lle grids are k_values alone. Cells are run
    serially in grid order, so reports are deterministic.
    """
    if (dataset is None) == (preset is None):
        raise ValueError("exactly one of dataset or preset is required")
    if not methods:
        raise ValueError("at least one method is required")
    for m in methods:
        if m not in ("llr", "heat", "lle"):
            raise ValueError(f"unknown graph method {m!r}")
    if "llr" in methods and not lambdas:
        raise ValueError("llr sweeps need at least one lambda")
    if not k_values:
        raise ValueError("at least one k value is required")
    if not seeds:
        raise ValueError("at least one seed is required")
    if dataset is not None and dataset.labels is None:
        raise ValueError("evaluation sweeps require labels")

    cells: list[dict[str, Any]] = []
    for seed in seeds:
        if preset is not None:
            ds = synth_union_of_subspaces(preset_spec(preset, per_subspace, noise_sigma, seed))
        else:
            ds = dataset
        assert ds is not None and ds.labels is not None
        X, truth = ds.X, ds.labels
        dd = resolve_d_dict(d_dict, X.shape[0])

        for method in methods:
            if method == "llr":
                for lam in lambdas:
                    graphs = llr_graph_family(X, lam, dd, epsilon, k_values)
                    for k in k_values:
                        m = _cluster_cell(graphs[k], truth, n_clusters, restarts, seed)
                        cells.append({"method": "llr", "lambda": lam, "k": k, "seed": seed, **m})
            elif method == "heat":
                for k in k_values:
                    W = heat_kernel_graph(X, HeatKernelParams(k_nn=k, sigma=sigma))
                    m = _cluster_cell(W, truth, n_clusters, restarts, seed)
                    cells.append({"method": "heat", "lambda": None, "k": k, "seed": seed, **m})
            else:
                for k in k_values:
                    W = lle_graph(X, k_nn=k, epsilon=epsilon)
                    m = _cluster_cell(W, truth, n_clusters, restarts, seed)
                    cells.append({"method": "lle", "lambda": None, "k": k, "seed": seed, **m})

    summary: dict[str, Any] = {}
    for method in methods:
        rows = [c for c in cells if c["method"] == method]
        acs = np.array([c["ac"] for c in rows])
        nmis = np.array([c["nmi"] for c in rows])
        best = rows[int(np.argmax(acs))]
        best_by_seed = {}
        for seed in seeds:
            srows = [c for c in rows if c["seed"] == seed]
            sacs = np.array([c["ac"] for c in srows])
            best_by_seed[str(seed)] = srows[int(np.argmax(sacs))]
        summary[method] = {
            "mean_ac": float(acs.mean()),
            "max_ac": float(acs.max()),
            "mean_nmi": float(nmis.mean()),
            "max_nmi": float(nmis.max()),
            "best": best,
            "best_by_seed": best_by_seed,
        }
    return {"cells": cells, "summary": summary}


__all__ = [
    "DEFAULT_D_DICT_CAP",
    "resolve_d_dict",
    "preset_spec",
    "build_graph_by_method",
    "llr_graph_family",
    "cluster_graph",
    "evaluate_clustering",
    "classify_run",
    "sweep_run",
]
