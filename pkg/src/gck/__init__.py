"""gck: collapse a labeled training graph to a node budget, preserving
topology (centrality-guided edge contraction) and the feature-label
distribution (dimension-normalized clustering), then pre-aggregate features
and train a quantization-friendly MLP on the result."""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend
from .centrality import (
    CentralityScores,
    betweenness_centrality,
    closeness_centrality,
    compute_centrality,
    degree_centrality,
    eigenvector_centrality,
    pagerank_centrality,
)
from .cluster import (
    ClusterAssignment,
    NormalizationParams,
    build_m,
    distribute_budget,
    kmeans,
    scale_normalize,
)
from .collapse import CollapseParams, CollapseResult, agnostic_collapse, falcon_collapse, tie_break
from .graph import (
    AttributeSet,
    Graph,
    MergeMap,
    build_graph,
    compact_alive,
    connected_components,
    merge_node,
    training_subgraph,
)
from .pipeline import PipelineConfig, run_pipeline, run_sweep
from .quantize import QuantizedBlock, dequantize, quantize
from .sign import SignTensor, SparseMatrix, normalized_adjacency, sign_features
from .trainer import (
    MetricsReport,
    Mlp,
    MlpConfig,
    evaluate,
    label_distribution_error,
    train_mlp,
)

__all__ = [
    "__version__",
    "kernel_backend",
    "AttributeSet", "Graph", "MergeMap", "build_graph", "merge_node",
    "training_subgraph", "compact_alive", "connected_components",
    "CentralityScores", "degree_centrality", "betweenness_centrality",
    "closeness_centrality", "pagerank_centrality", "eigenvector_centrality",
    "compute_centrality",
    "NormalizationParams", "ClusterAssignment", "scale_normalize", "build_m",
    "kmeans", "distribute_budget",
    "CollapseParams", "CollapseResult", "falcon_collapse", "agnostic_collapse",
    "tie_break",
    "SparseMatrix", "SignTensor", "normalized_adjacency", "sign_features",
    "QuantizedBlock", "quantize", "dequantize",
    "MlpConfig", "Mlp", "MetricsReport", "train_mlp", "evaluate",
    "label_distribution_error",
    "PipelineConfig", "run_pipeline", "run_sweep",
]
