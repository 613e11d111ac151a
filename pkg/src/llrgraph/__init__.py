"""Similarity graphs from locally linear representation.

Builds sparse similarity graphs by reconstructing each sample from its
nearest-neighbor dictionary under a distance-weighted regularizer, with
spectral clustering and linear embedding pipelines on top, plus heat-kernel
and unregularized reconstruction baselines.
"""

from .baselines import HeatKernelParams, heat_kernel_graph, lle_graph
from .data import (
    LabeledDataset,
    PcaModel,
    SyntheticSpec,
    load_csv,
    pca_fit,
    pca_transform,
    save_csv,
    synth_union_of_subspaces,
    train_test_split,
)
from .embedding import (
    generalized_sym_eig,
    load_projection,
    lpp_embed,
    nn_classify,
    npe_from_graph,
    save_projection,
    transform,
)
from .graphio import read_graph, read_labels, write_graph, write_labels
from .llr import (
    Dictionary,
    HyperParams,
    build_dictionary,
    build_llr_coefficients,
    build_llr_graph,
    distance_diagonal,
    solve_coefficients,
    sparsify,
    symmetrize,
)
from .metrics import (
    classification_accuracy,
    clustering_accuracy,
    contingency_table,
    hungarian,
    intra_class_edge_mass,
    nmi,
)
from .runs import (
    build_graph_by_method,
    classify_run,
    cluster_graph,
    evaluate_clustering,
    preset_spec,
    resolve_d_dict,
    sweep_run,
)
from .spectral import KMeansConfig, kmeans, normalized_laplacian_embedding, spectral_cluster, sym_eig

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "LabeledDataset",
    "SyntheticSpec",
    "PcaModel",
    "load_csv",
    "save_csv",
    "train_test_split",
    "pca_fit",
    "pca_transform",
    "synth_union_of_subspaces",
    "HyperParams",
    "Dictionary",
    "build_dictionary",
    "distance_diagonal",
    "solve_coefficients",
    "sparsify",
    "symmetrize",
    "build_llr_coefficients",
    "build_llr_graph",
    "HeatKernelParams",
    "heat_kernel_graph",
    "lle_graph",
    "KMeansConfig",
    "sym_eig",
    "normalized_laplacian_embedding",
    "kmeans",
    "spectral_cluster",
    "generalized_sym_eig",
    "npe_from_graph",
    "lpp_embed",
    "transform",
    "nn_classify",
    "save_projection",
    "load_projection",
    "contingency_table",
    "hungarian",
    "clustering_accuracy",
    "nmi",
    "classification_accuracy",
    "intra_class_edge_mass",
    "write_graph",
    "read_graph",
    "write_labels",
    "read_labels",
    "resolve_d_dict",
    "preset_spec",
    "build_graph_by_method",
    "cluster_graph",
    "evaluate_clustering",
    "classify_run",
    "sweep_run",
]
