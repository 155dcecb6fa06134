"""Fixed-dimension node embeddings for labeled knowledge graphs.

Embeddings concatenate four per-node sub-feature blocks (hop-based topology
patterns, label one-hots, a spectral-bisection cluster index, and a bucketed
random-walk probability), weighted by four factors learned with coordinate
SGD against a Jaccard/common-label ground truth, then unit-normalized for
cosine-similarity queries.
"""

from .clustering import (
    ClusterAssignment,
    EigenConfig,
    connected_components,
    fiedler_vector,
    laplacian_matrix,
    rsb_partition,
)
from .errors import (
    GraphVecError,
    ParseError,
    SolverError,
    TrainingError,
    UnknownNodeError,
    ValidationError,
)
from .features import (
    EmbeddingTable,
    SubFeatureMatrix,
    VectorLayout,
    assemble_subfeatures,
    embed_all,
    hop_pattern_block,
    vector_size,
)
from .graph import Graph, LabelRegistry, build_graph, load_graph
from .pipeline import EmbeddingRun, run_embedding
from .ranking import (
    ProbabilityVector,
    RankConfig,
    TransitionOperator,
    min_max_scale,
    probability_bucket,
    solve_transitional_probabilities,
)
from .training import (
    SampleSet,
    TrainConfig,
    WeightVector,
    ground_truth,
    jaccard,
    loss_gradient,
    node_loss,
    stratified_sample,
    train_weights,
    weighted_inner_product,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterAssignment",
    "EigenConfig",
    "EmbeddingRun",
    "EmbeddingTable",
    "Graph",
    "GraphVecError",
    "LabelRegistry",
    "ParseError",
    "ProbabilityVector",
    "RankConfig",
    "SampleSet",
    "SolverError",
    "SubFeatureMatrix",
    "TrainConfig",
    "TrainingError",
    "TransitionOperator",
    "UnknownNodeError",
    "ValidationError",
    "VectorLayout",
    "WeightVector",
    "assemble_subfeatures",
    "build_graph",
    "connected_components",
    "embed_all",
    "fiedler_vector",
    "ground_truth",
    "hop_pattern_block",
    "jaccard",
    "laplacian_matrix",
    "load_graph",
    "loss_gradient",
    "min_max_scale",
    "node_loss",
    "probability_bucket",
    "rsb_partition",
    "run_embedding",
    "solve_transitional_probabilities",
    "stratified_sample",
    "train_weights",
    "vector_size",
    "weighted_inner_product",
]
