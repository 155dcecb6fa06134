"""Per-node sub-feature blocks flattened onto one vector layout.

Four blocks occupy contiguous, disjoint index ranges: hop-based topology
patterns, label one-hots, the cluster index, and the bucketed transition
probability.  Each block is L2-normalized independently after assembly, so
the learned inter-feature weights are the only cross-block scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .clustering import ClusterAssignment
from .errors import ValidationError
from .graph import Graph, LabelRegistry
from .ranking import ProbabilityVector, min_max_scale, probability_bucket

NUM_SUBFEATURES = 4


@dataclass(frozen=True)
class VectorLayout:
    """Block offsets and widths of the flattened embedding space.

    The total size is ``max_hops * max_forks_perhop * max_edges_perfork``
    pattern slots plus one slot per label, cluster and probability bucket.
    """

    num_labels: int
    max_hops: int = 3
    max_forks_perhop: int = 4
    max_edges_perfork: int = 4
    max_num_clusters: int = 8
    num_probability_buckets: int = 10

    max_patterns: int = field(init=False)
    pattern_offset: int = field(init=False)
    label_offset: int = field(init=False)
    cluster_offset: int = field(init=False)
    probability_offset: int = field(init=False)
    total_size: int = field(init=False)

    def __post_init__(self):
        if self.num_labels < 0:
            raise ValidationError("num_labels must be nonnegative")
        for name in (
            "max_hops",
            "max_forks_perhop",
            "max_edges_perfork",
            "max_num_clusters",
            "num_probability_buckets",
        ):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be at least 1")
        patterns = self.max_hops * self.max_forks_perhop * self.max_edges_perfork
        object.__setattr__(self, "max_patterns", patterns)
        object.__setattr__(self, "pattern_offset", 0)
        object.__setattr__(self, "label_offset", patterns)
        object.__setattr__(self, "cluster_offset", patterns + self.num_labels)
        object.__setattr__(
            self,
            "probability_offset",
            patterns + self.num_labels + self.max_num_clusters,
        )
        object.__setattr__(
            self, "total_size", self.probability_offset + self.num_probability_buckets
        )

    def block_range(self, r: int) -> tuple[int, int]:
        """Half-open global index range of sub-feature ``r``."""
        bounds = (
            self.pattern_offset,
            self.label_offset,
            self.cluster_offset,
            self.probability_offset,
            self.total_size,
        )
        return bounds[r], bounds[r + 1]


def vector_size(layout: VectorLayout) -> int:
    """Total embedding dimension: the sum of the four block widths."""
    return (
        layout.max_hops * layout.max_forks_perhop * layout.max_edges_perfork
        + layout.num_labels
        + layout.max_num_clusters
        + layout.num_probability_buckets
    )


@dataclass
class SubFeatureMatrix:
    """Sparse per-node blocks, keyed by global vector index.

    ``node_blocks[i][r]`` maps indices inside block ``r``'s range to values;
    after assembly every block has L2 norm 0 or 1.
    """

    layout: VectorLayout
    node_blocks: list[tuple[dict[int, float], ...]]

    @property
    def num_nodes(self) -> int:
        return len(self.node_blocks)

    def block_matrix(self, r: int) -> np.ndarray:
        """Dense ``num_nodes x width(r)`` matrix of block ``r`` (local columns)."""
        start, stop = self.layout.block_range(r)
        out = np.zeros((self.num_nodes, stop - start))
        for i, blocks in enumerate(self.node_blocks):
            for idx, value in blocks[r].items():
                out[i, idx - start] = value
        return out

    def weighted_vectors(self, weights: Sequence[float]) -> np.ndarray:
        """Dense rows of the weighted, un-normalized concatenation."""
        out = np.zeros((self.num_nodes, self.layout.total_size))
        for i, blocks in enumerate(self.node_blocks):
            for r in range(NUM_SUBFEATURES):
                w = weights[r]
                for idx, value in blocks[r].items():
                    out[i, idx] = w * value
        return out


@dataclass
class EmbeddingTable:
    """Final per-node embeddings: unit rows (zero rows stay zero)."""

    vectors: np.ndarray
    layout: VectorLayout
    node_ids: list[str] | None = None

    @property
    def num_nodes(self) -> int:
        return self.vectors.shape[0]

    def cosine(self, i: int, k: int) -> float:
        """Cosine similarity between two embeddings; 0 if either is zero."""
        a, b = self.vectors[i], self.vectors[k]
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na == 0.0 or nb == 0.0:
            return 0.0
        return float(a @ b / (na * nb))


def hop_pattern_block(graph: Graph, i: int, layout: VectorLayout) -> dict[int, float]:
    """One-hot hop-pattern indices for node ``i`` (values 1.0, un-normalized).

    BFS runs over the symmetrized graph up to ``max_hops``.  At hop h, every
    frontier node of hop h-1 that contributes at least one unvisited node is
    a fork whose arm size is that contribution count; frontier nodes claim
    new nodes in ascending index order, so arms are disjoint and the encoding
    is deterministic.  Forks are ranked by descending arm size (ties by
    smallest contributing node), at most ``max_forks_perhop`` are kept, and
    arm sizes are clamped to ``max_edges_perfork``.
    """
    block: dict[int, float] = {}
    visited = {i}
    frontier = [i]
    for hop in range(1, layout.max_hops + 1):
        forks: list[tuple[int, int]] = []  # (arm size, contributing node)
        next_frontier: list[int] = []
        for u in frontier:
            arm = [v for v in graph.neighbors_undirected(u) if v not in visited]
            if arm:
                visited.update(arm)
                next_frontier.extend(arm)
                forks.append((len(arm), u))
        forks.sort(key=lambda f: (-f[0], f[1]))
        for rank, (size, _u) in enumerate(forks[: layout.max_forks_perhop]):
            clamped = min(size, layout.max_edges_perfork)
            index = layout.pattern_offset + (
                (hop - 1) * layout.max_forks_perhop + rank
            ) * layout.max_edges_perfork + (clamped - 1)
            block[index] = 1.0
        if not next_frontier:
            break
        frontier = sorted(next_frontier)
    return block


def assemble_subfeatures(
    graph: Graph,
    labels: LabelRegistry,
    clusters: ClusterAssignment,
    probs: ProbabilityVector,
    layout: VectorLayout,
) -> SubFeatureMatrix:
    """Build all four blocks for every node and L2-normalize each block.

    Label indices land at ``label_offset + label``, the cluster index at
    ``cluster_offset + cluster``, and the bucketed min-max scaled probability
    at ``probability_offset + bucket``.  Raises :class:`ValidationError` when
    an index would fall outside its block.
    """
    nv = graph.num_nodes
    if len(clusters.cluster_of) != nv or len(probs.p) != nv:
        raise ValidationError("cluster or probability data does not match the graph")
    if clusters.num_clusters > layout.max_num_clusters:
        raise ValidationError(
            f"{clusters.num_clusters} clusters exceed layout capacity "
            f"{layout.max_num_clusters}"
        )
    scaled = min_max_scale(probs.p)

    node_blocks: list[tuple[dict[int, float], ...]] = []
    for i in range(nv):
        patterns = hop_pattern_block(graph, i, layout)

        label_block: dict[int, float] = {}
        for li in labels.labels_of(i):
            if li >= layout.num_labels:
                raise ValidationError(
                    f"label index {li} exceeds layout capacity {layout.num_labels}"
                )
            label_block[layout.label_offset + li] = 1.0

        c = clusters.cluster_of[i]
        if c >= layout.max_num_clusters:
            raise ValidationError(
                f"cluster index {c} exceeds layout capacity {layout.max_num_clusters}"
            )
        cluster_block = {layout.cluster_offset + c: 1.0}

        bucket = probability_bucket(
            float(scaled[i]), layout.num_probability_buckets
        )
        probability_block = {layout.probability_offset + bucket: 1.0}

        node_blocks.append(
            tuple(
                _normalize_block(b)
                for b in (patterns, label_block, cluster_block, probability_block)
            )
        )
    return SubFeatureMatrix(layout=layout, node_blocks=node_blocks)


def _normalize_block(block: dict[int, float]) -> dict[int, float]:
    norm = np.sqrt(sum(v * v for v in block.values()))
    if norm == 0.0:
        return block
    return {idx: v / norm for idx, v in block.items()}


def embed_all(
    sub: SubFeatureMatrix,
    weights,
    layout: VectorLayout | None = None,
    node_ids: list[str] | None = None,
) -> EmbeddingTable:
    """Weight each block, concatenate, and normalize the full vectors.

    ``weights`` is a 4-sequence or anything exposing ``.w`` (such as a
    trained :class:`~graphvec.training.WeightVector`).  All-zero
    concatenations stay zero.  Scaling all weights by a common factor leaves
    the result unchanged.
    """
    w = np.asarray(getattr(weights, "w", weights), dtype=float)
    if w.shape != (NUM_SUBFEATURES,):
        raise ValidationError(f"expected {NUM_SUBFEATURES} weights, got {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValidationError("weights must be finite")
    if np.all(w == 0.0):
        raise ValidationError("at least one weight must be nonzero")
    if layout is not None and layout != sub.layout:
        raise ValidationError("layout does not match the sub-feature matrix")

    vectors = sub.weighted_vectors(w)
    norms = np.linalg.norm(vectors, axis=1)
    nonzero = norms > 0.0
    vectors[nonzero] /= norms[nonzero, None]
    return EmbeddingTable(vectors=vectors, layout=sub.layout, node_ids=node_ids)
