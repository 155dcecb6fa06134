"""Ground-truth estimation, pairwise loss, and coordinate-wise SGD.

The four block weights are fitted so that un-normalized weighted inner
products between sampled node pairs match a ground truth blending Jaccard
similarity of undirected neighborhoods with the normalized common-label
count.  Updates are Gauss-Seidel: each weight's gradient is evaluated at the
partially updated weight vector, one coordinate sweep per epoch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .clustering import ClusterAssignment
from .errors import TrainingError, ValidationError
from .features import NUM_SUBFEATURES, SubFeatureMatrix
from .graph import Graph, LabelRegistry

DEFAULT_MAX_SAMPLES = 256

TruthFn = Callable[[int, int], float]


@dataclass(frozen=True)
class TrainConfig:
    """SGD options; every default can be overridden from the CLI."""

    alpha: float = 0.5
    learning_rate: float = 0.05
    max_epochs: int = 100
    rel_delta_tol: float = 0.001
    num_samples: int | None = None  # resolved to min(NV, 256) when unset
    rng_seed: int = 0
    initial_weights: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError("alpha must lie in [0, 1]")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be positive")
        if self.max_epochs < 1:
            raise ValidationError("max_epochs must be at least 1")
        if self.rel_delta_tol < 0:
            raise ValidationError("rel_delta_tol must be nonnegative")
        if self.num_samples is not None and self.num_samples < 2:
            raise ValidationError("num_samples must be at least 2")
        if len(self.initial_weights) != NUM_SUBFEATURES or not all(
            math.isfinite(w) for w in self.initial_weights
        ):
            raise ValidationError("initial_weights must be 4 finite values")


@dataclass
class WeightVector:
    """Learned block weights plus the per-epoch training history.

    ``history`` rows are ``(epoch, mean_loss, weights)`` with epoch 0 holding
    the initial state.
    """

    w: np.ndarray
    history: list[tuple[int, float, tuple[float, float, float, float]]] = field(
        default_factory=list
    )


@dataclass(frozen=True)
class SampleSet:
    """Node indices drawn for training; pairs always exclude self."""

    nodes: tuple[int, ...]

    @property
    def nk(self) -> int:
        """Number of partners each sampled node is paired with."""
        return len(self.nodes) - 1


def jaccard(graph: Graph, i: int, k: int) -> float:
    """Jaccard similarity of undirected neighbor sets (self excluded).

    Defined as 1 for ``i == k`` and 0 when both neighborhoods are empty.
    """
    if i == k:
        return 1.0
    a = set(graph.neighbors_undirected(i))
    b = set(graph.neighbors_undirected(k))
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


def ground_truth(
    graph: Graph, labels: LabelRegistry, i: int, k: int, alpha: float
) -> float:
    """Blend of Jaccard score and normalized common-label count.

    The label term divides by the number of distinct node-associated labels
    in the whole graph and is 0 for an unlabeled graph.
    """
    num_distinct = labels.num_labels
    label_term = labels.common_labels(i, k) / num_distinct if num_distinct else 0.0
    return alpha * jaccard(graph, i, k) + (1.0 - alpha) * label_term


def weighted_inner_product(
    sub: SubFeatureMatrix, weights: Sequence[float], i: int, k: int
) -> float:
    """Un-normalized similarity sum_r w_r^2 <s_r(i), s_r(k)>."""
    total = 0.0
    for r in range(NUM_SUBFEATURES):
        a, b = sub.node_blocks[i][r], sub.node_blocks[k][r]
        if len(b) < len(a):
            a, b = b, a
        dot = sum(v * b.get(idx, 0.0) for idx, v in a.items())
        total += weights[r] * weights[r] * dot
    return total


def node_loss(
    sub: SubFeatureMatrix,
    weights: Sequence[float],
    truth: TruthFn,
    i: int,
    sample: SampleSet,
) -> float:
    """Mean squared residual of node ``i`` against every other sampled node."""
    if sample.nk < 1:
        raise ValidationError("sample must contain at least 2 nodes")
    total = 0.0
    for k in sample.nodes:
        if k == i:
            continue
        residual = weighted_inner_product(sub, weights, i, k) - truth(i, k)
        total += residual * residual
    return total / sample.nk


class PairKernel:
    """Blockwise Gram matrices over a sample for fast loss and gradients."""

    def __init__(self, sub: SubFeatureMatrix, truth: TruthFn, sample: SampleSet):
        if sample.nk < 1:
            raise ValidationError("sample must contain at least 2 nodes")
        rows = np.asarray(sample.nodes, dtype=np.intp)
        self.grams = []
        for r in range(NUM_SUBFEATURES):
            block = sub.block_matrix(r)[rows]
            self.grams.append(block @ block.T)
        n = len(rows)
        self.truth_matrix = np.zeros((n, n))
        for a in range(n):
            for b in range(a + 1, n):
                g = truth(int(rows[a]), int(rows[b]))
                self.truth_matrix[a, b] = g
                self.truth_matrix[b, a] = g
        self.offdiag = ~np.eye(n, dtype=bool)
        self.pair_count = n * (n - 1)

    def inner_products(self, weights: np.ndarray) -> np.ndarray:
        return sum(
            weights[r] * weights[r] * self.grams[r] for r in range(NUM_SUBFEATURES)
        )

    def mean_loss(self, weights: np.ndarray) -> float:
        residual = self.inner_products(weights) - self.truth_matrix
        return float((residual[self.offdiag] ** 2).sum() / self.pair_count)

    def gradient(self, weights: np.ndarray, j: int) -> float:
        residual = self.inner_products(weights) - self.truth_matrix
        coupling = (residual * self.grams[j])[self.offdiag].sum()
        return float(4.0 * weights[j] * coupling / self.pair_count)


def loss_gradient(
    sub: SubFeatureMatrix,
    weights: Sequence[float],
    truth: TruthFn,
    sample: SampleSet,
    j: int,
) -> float:
    """Analytic derivative of the sample-mean loss with respect to weight j.

    Matches central finite differences of the mean of :func:`node_loss`; the
    residual times the blockwise inner product carries a factor of 4 from
    differentiating the squared quadratic form.
    """
    if not 0 <= j < NUM_SUBFEATURES:
        raise ValidationError(f"weight index {j} outside 0..{NUM_SUBFEATURES - 1}")
    kernel = PairKernel(sub, truth, sample)
    return kernel.gradient(np.asarray(weights, dtype=float), j)


def stratified_sample(
    clusters: ClusterAssignment, num_samples: int, rng_seed: int
) -> SampleSet:
    """Draw an equal per-cluster quota of nodes, without replacement.

    Each cluster first contributes ``ceil(num_samples / num_clusters)`` nodes
    (all of them if smaller).  The total is then balanced to exactly
    ``min(num_samples, NV)``: excess is dropped one node at a time from the
    cluster with the largest current contribution (ties to the higher
    cluster index), and shortfall from uneven cluster sizes is topped up
    from the cluster with the smallest contribution that still has spare
    nodes (ties to the lower index).  Every nonempty cluster keeps at least
    one node whenever ``num_samples >= num_clusters``.
    """
    if num_samples < 2:
        raise ValidationError("num_samples must be at least 2")
    if clusters.num_clusters < 1:
        raise ValidationError("cluster assignment is empty")

    quota = -(-num_samples // clusters.num_clusters)
    rng = np.random.default_rng(rng_seed)
    shuffled: list[list[int]] = []
    takes: list[int] = []
    for members in clusters.members():
        order = rng.permutation(len(members))
        shuffled.append([members[j] for j in order])
        takes.append(min(quota, len(members)))

    total = sum(takes)
    while total > num_samples:
        largest = max(range(len(takes)), key=lambda c: (takes[c], c))
        takes[largest] -= 1
        total -= 1
    while total < num_samples:
        spare = [c for c in range(len(takes)) if takes[c] < len(shuffled[c])]
        if not spare:
            break
        smallest = min(spare, key=lambda c: (takes[c], c))
        takes[smallest] += 1
        total += 1

    chosen = sorted(
        node for c, batch in enumerate(shuffled) for node in batch[: takes[c]]
    )
    return SampleSet(nodes=tuple(chosen))


def train_weights(
    sub: SubFeatureMatrix,
    graph: Graph,
    labels: LabelRegistry,
    clusters: ClusterAssignment,
    cfg: TrainConfig | None = None,
) -> WeightVector:
    """Fit the four block weights by coordinate-wise gradient descent.

    One epoch updates w_0..w_3 in order, each step using the gradient at the
    current partially updated weights.  Stops early when the largest relative
    weight change over an epoch falls below ``rel_delta_tol``; raises
    :class:`TrainingError` on divergence (non-finite weights or mean loss
    above 1e12).
    """
    cfg = cfg or TrainConfig()
    requested = cfg.num_samples
    if requested is None:
        requested = min(graph.num_nodes, DEFAULT_MAX_SAMPLES)
    requested = min(requested, graph.num_nodes)
    if requested < 2:
        raise ValidationError("training needs a sample of at least 2 nodes")

    sample = stratified_sample(clusters, requested, cfg.rng_seed)

    def truth(i: int, k: int) -> float:
        return ground_truth(graph, labels, i, k, cfg.alpha)

    kernel = PairKernel(sub, truth, sample)
    w = np.asarray(cfg.initial_weights, dtype=float)
    history = [(0, kernel.mean_loss(w), _snapshot(w))]

    for epoch in range(1, cfg.max_epochs + 1):
        w_start = w.copy()
        for j in range(NUM_SUBFEATURES):
            w[j] -= cfg.learning_rate * kernel.gradient(w, j)
        mean_loss = kernel.mean_loss(w)
        if not np.all(np.isfinite(w)) or not math.isfinite(mean_loss) or mean_loss > 1e12:
            raise TrainingError(
                f"training diverged at epoch {epoch} (mean loss {mean_loss:.3e}, "
                f"weights {w.tolist()})",
                epoch=epoch,
                weights=_snapshot(w),
            )
        history.append((epoch, mean_loss, _snapshot(w)))
        rel_delta = max(
            abs(w[j] - w_start[j]) / max(abs(w[j]), 1e-12)
            for j in range(NUM_SUBFEATURES)
        )
        if rel_delta < cfg.rel_delta_tol:
            break

    return WeightVector(w=w, history=history)


def _snapshot(w: np.ndarray) -> tuple[float, float, float, float]:
    return tuple(float(x) for x in w)
