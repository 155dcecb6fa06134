"""End-to-end embedding runs plus the CSV/JSON surfaces around them.

All emitted files are UTF-8 with ``\\n`` line endings, carry headers, and
print floats with 12 significant digits (enough that unit norms and cosine
identities survive a round-trip), so identical configurations produce
byte-identical outputs.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clustering import ClusterAssignment, EigenConfig, rsb_partition
from .errors import UnknownNodeError, ValidationError
from .features import (
    EmbeddingTable,
    SubFeatureMatrix,
    VectorLayout,
    assemble_subfeatures,
    embed_all,
)
from .graph import Graph, LabelRegistry
from .ranking import ProbabilityVector, RankConfig, solve_transitional_probabilities
from .training import TrainConfig, WeightVector, train_weights

FLOAT_FORMAT = ".12g"


def format_float(x: float) -> str:
    return format(float(x), FLOAT_FORMAT)


@dataclass
class EmbeddingRun:
    """Everything produced by one full pipeline run."""

    graph: Graph
    labels: LabelRegistry
    clusters: ClusterAssignment
    probabilities: ProbabilityVector
    layout: VectorLayout
    subfeatures: SubFeatureMatrix
    weights: WeightVector
    table: EmbeddingTable


def run_embedding(
    graph: Graph,
    labels: LabelRegistry,
    max_hops: int = 3,
    max_forks_perhop: int = 4,
    max_edges_perfork: int = 4,
    max_num_clusters: int = 8,
    eigen_cfg: EigenConfig | None = None,
    rank_cfg: RankConfig | None = None,
    train_cfg: TrainConfig | None = None,
) -> EmbeddingRun:
    """Cluster, rank, assemble sub-features, train weights, and embed."""
    if graph.num_nodes < 1:
        raise ValidationError("graph has no nodes")
    rank_cfg = rank_cfg or RankConfig()
    clusters = rsb_partition(graph, max_num_clusters, eigen_cfg)
    probabilities = solve_transitional_probabilities(graph, rank_cfg)
    layout = VectorLayout(
        num_labels=labels.num_labels,
        max_hops=max_hops,
        max_forks_perhop=max_forks_perhop,
        max_edges_perfork=max_edges_perfork,
        max_num_clusters=max_num_clusters,
        num_probability_buckets=rank_cfg.num_probability_buckets,
    )
    subfeatures = assemble_subfeatures(graph, labels, clusters, probabilities, layout)
    weights = train_weights(subfeatures, graph, labels, clusters, train_cfg)
    table = embed_all(subfeatures, weights, node_ids=list(graph.node_ids))
    return EmbeddingRun(
        graph=graph,
        labels=labels,
        clusters=clusters,
        probabilities=probabilities,
        layout=layout,
        subfeatures=subfeatures,
        weights=weights,
        table=table,
    )


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------


def write_embeddings_csv(table: EmbeddingTable, path) -> None:
    """Rows ``node_id,v0,...,v{D-1}`` in node index order."""
    if table.node_ids is None:
        raise ValidationError("embedding table has no node ids to write")
    dim = table.layout.total_size
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id"] + [f"v{j}" for j in range(dim)])
        for node_id, row in zip(table.node_ids, table.vectors):
            writer.writerow([node_id] + [format_float(x) for x in row])


def write_loss_history_csv(weights: WeightVector, path) -> None:
    """Rows ``epoch,mean_loss,w0,w1,w2,w3`` suitable for convergence plots."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["epoch", "mean_loss", "w0", "w1", "w2", "w3"])
        for epoch, mean_loss, snapshot in weights.history:
            writer.writerow(
                [epoch, format_float(mean_loss)] + [format_float(w) for w in snapshot]
            )


def write_clusters_csv(graph: Graph, clusters: ClusterAssignment, path) -> None:
    """Rows ``node_id,cluster_index`` in node index order."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id", "cluster_index"])
        for node_id, c in zip(graph.node_ids, clusters.cluster_of):
            writer.writerow([node_id, c])


def write_probabilities_csv(graph: Graph, probs: ProbabilityVector, path) -> None:
    """Rows ``node_id,probability`` in node index order."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id", "probability"])
        for node_id, p in zip(graph.node_ids, probs.p):
            writer.writerow([node_id, format_float(p)])


def write_similarity_csv(rows, path) -> None:
    """Rows ``node_a,node_b,similarity``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_a", "node_b", "similarity"])
        for node_a, node_b, sim in rows:
            writer.writerow([node_a, node_b, format_float(sim)])


def write_sidecar_json(run: EmbeddingRun, config: dict, path) -> None:
    """Config, layout, learned weights, and loss history as one JSON file."""
    layout = run.layout
    payload = {
        "config": config,
        "layout": {
            "max_hops": layout.max_hops,
            "max_forks_perhop": layout.max_forks_perhop,
            "max_edges_perfork": layout.max_edges_perfork,
            "num_labels": layout.num_labels,
            "max_num_clusters": layout.max_num_clusters,
            "num_probability_buckets": layout.num_probability_buckets,
            "pattern_offset": layout.pattern_offset,
            "label_offset": layout.label_offset,
            "cluster_offset": layout.cluster_offset,
            "probability_offset": layout.probability_offset,
            "total_size": layout.total_size,
        },
        "num_nodes": run.graph.num_nodes,
        "num_edges": run.graph.num_edges,
        "num_clusters": run.clusters.num_clusters,
        "label_index": run.labels.label_index,
        "weights": [float(w) for w in run.weights.w],
        "loss_history": [
            [epoch, mean_loss, *snapshot]
            for epoch, mean_loss, snapshot in run.weights.history
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# similarity queries over an embeddings file
# ---------------------------------------------------------------------------


def read_embeddings_csv(path) -> tuple[list[str], np.ndarray]:
    """Parse an embeddings CSV back into ids and a dense matrix."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"embeddings file {path} is empty") from None
        if len(header) < 2 or header[0] != "node_id":
            raise ValidationError("embeddings header must be node_id,v0,...")
        dim = len(header) - 1
        if header[1:] != [f"v{j}" for j in range(dim)]:
            raise ValidationError("embeddings header must be node_id,v0,...")
        ids: list[str] = []
        rows: list[list[float]] = []
        for row in reader:
            if not row:
                continue
            if len(row) != dim + 1:
                raise ValidationError(
                    f"embedding row for {row[0]!r} has {len(row) - 1} values, "
                    f"expected {dim}"
                )
            ids.append(row[0])
            rows.append([float(x) for x in row[1:]])
    if len(set(ids)) != len(ids):
        raise ValidationError("embeddings file contains duplicate node ids")
    return ids, np.asarray(rows, dtype=float)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of two vectors; 0 when either is the zero vector."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b / (na * nb))


def pair_similarities(
    ids: list[str], matrix: np.ndarray, pairs: list[tuple[str, str]]
) -> list[tuple[str, str, float]]:
    """Cosine similarity for explicit id pairs, in the given order."""
    index = {node_id: i for i, node_id in enumerate(ids)}
    rows = []
    for id_a, id_b in pairs:
        for node_id in (id_a, id_b):
            if node_id not in index:
                raise UnknownNodeError(f"unknown node id {node_id!r}")
        rows.append(
            (id_a, id_b, cosine_similarity(matrix[index[id_a]], matrix[index[id_b]]))
        )
    return rows


def top_k_similar(
    ids: list[str], matrix: np.ndarray, query_id: str, k: int
) -> list[tuple[str, str, float]]:
    """The k nodes most similar to the query (self excluded, ties by id)."""
    index = {node_id: i for i, node_id in enumerate(ids)}
    if query_id not in index:
        raise UnknownNodeError(f"unknown node id {query_id!r}")
    if k < 1:
        raise ValidationError("top_k must be at least 1")
    q = matrix[index[query_id]]
    scored = [
        (node_id, cosine_similarity(q, matrix[i]))
        for node_id, i in index.items()
        if node_id != query_id
    ]
    scored.sort(key=lambda t: (-t[1], t[0]))
    return [(query_id, node_id, sim) for node_id, sim in scored[:k]]


def parse_pair_list(text: str) -> list[tuple[str, str]]:
    """Parse ``"A:B,C:D"`` into id pairs."""
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ValidationError(
                f"pair {chunk!r} is not of the form NODE_A:NODE_B"
            )
        pairs.append((parts[0], parts[1]))
    if not pairs:
        raise ValidationError("no pairs given")
    return pairs


def ensure_directory(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out
