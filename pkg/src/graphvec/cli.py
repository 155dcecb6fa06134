"""Command-line surface: embed, cluster, rank, and similarity subcommands.

Flags use the same lower_snake_case names as the solver options they map to;
errors exit nonzero with one machine-readable JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from .clustering import EigenConfig, rsb_partition
from .errors import GraphVecError, ValidationError
from .graph import load_graph
from .pipeline import (
    EmbeddingRun,
    ensure_directory,
    pair_similarities,
    parse_pair_list,
    read_embeddings_csv,
    run_embedding,
    top_k_similar,
    write_clusters_csv,
    write_embeddings_csv,
    write_loss_history_csv,
    write_probabilities_csv,
    write_sidecar_json,
    write_similarity_csv,
)
from .ranking import RankConfig, solve_transitional_probabilities
from .training import TrainConfig

EMBEDDINGS_FILE = "embeddings.csv"
SIDECAR_FILE = "embedding_run.json"
LOSS_HISTORY_FILE = "loss_history.csv"
PAIR_SIMILARITY_FILE = "pair_similarity.csv"


def _weights_arg(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("initial_weights needs 4 comma-separated values")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid weights {text!r}") from None


def _add_input_options(parser):
    parser.add_argument("--edges", required=True, help="edges CSV (src,dst[,weight[,label]])")
    parser.add_argument("--nodes", default=None, help="nodes CSV (node_id,labels)")
    parser.add_argument(
        "--undirected",
        action="store_true",
        help="materialize every edge in both directions",
    )


def _add_eigen_options(parser):
    parser.add_argument("--residual_tol", type=float, default=1e-8)
    parser.add_argument("--max_iterations", type=int, default=10000)


def _add_rank_options(parser):
    parser.add_argument("--ranking_factor", type=float, default=0.15)
    parser.add_argument("--convergence_tol", type=float, default=1e-9)
    parser.add_argument("--max_sweeps", type=int, default=1000)
    parser.add_argument("--num_probability_buckets", type=int, default=10)


def _add_layout_options(parser):
    parser.add_argument("--max_hops", type=int, default=3)
    parser.add_argument("--max_forks_perhop", type=int, default=4)
    parser.add_argument("--max_edges_perfork", type=int, default=4)
    parser.add_argument("--max_num_clusters", type=int, default=8)


def _add_train_options(parser):
    parser.add_argument("--alpha", type=float, default=0.5)
    parser.add_argument("--beta", type=float, default=0.05, help="learning rate")
    parser.add_argument("--max_epochs", type=int, default=100)
    parser.add_argument("--rel_delta_tol", type=float, default=0.001)
    parser.add_argument(
        "--num_samples", type=int, default=None, help="default min(NV, 256)"
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--initial_weights", type=_weights_arg, default=(1.0, 1.0, 1.0, 1.0)
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphvec",
        description="Knowledge-graph node embeddings and similarity queries",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    embed = sub.add_parser("embed", help="run the full embedding pipeline")
    _add_input_options(embed)
    _add_layout_options(embed)
    _add_eigen_options(embed)
    _add_rank_options(embed)
    _add_train_options(embed)
    embed.add_argument("--output_dir", required=True)
    embed.add_argument(
        "--sample_points",
        default=None,
        help="pairs A:B,C:D to also score, written to pair_similarity.csv",
    )
    embed.set_defaults(func=cmd_embed)

    cluster = sub.add_parser("cluster", help="emit node_id,cluster_index")
    _add_input_options(cluster)
    _add_eigen_options(cluster)
    cluster.add_argument("--max_num_clusters", type=int, default=8)
    cluster.add_argument("--output", required=True)
    cluster.set_defaults(func=cmd_cluster)

    rank = sub.add_parser("rank", help="emit node_id,probability")
    _add_input_options(rank)
    _add_rank_options(rank)
    rank.add_argument("--output", required=True)
    rank.set_defaults(func=cmd_rank)

    similarity = sub.add_parser(
        "similarity", help="cosine similarity over an embeddings CSV"
    )
    similarity.add_argument("--embeddings", required=True)
    mode = similarity.add_mutually_exclusive_group(required=True)
    mode.add_argument("--pairs", default=None, help="pairs A:B,C:D")
    mode.add_argument("--query", default=None, help="node id for a top-k query")
    similarity.add_argument("--top_k", type=int, default=10)
    similarity.add_argument("--output", required=True)
    similarity.set_defaults(func=cmd_similarity)

    return parser


def _load(args):
    graph, labels = load_graph(args.nodes, args.edges, undirected=args.undirected)
    if graph.num_nodes < 1:
        raise ValidationError("graph has no nodes")
    return graph, labels


def _config_snapshot(args, num_samples: int) -> dict:
    return {
        "nodes": args.nodes,
        "edges": args.edges,
        "undirected": args.undirected,
        "max_hops": args.max_hops,
        "max_forks_perhop": args.max_forks_perhop,
        "max_edges_perfork": args.max_edges_perfork,
        "max_num_clusters": args.max_num_clusters,
        "residual_tol": args.residual_tol,
        "max_iterations": args.max_iterations,
        "ranking_factor": args.ranking_factor,
        "convergence_tol": args.convergence_tol,
        "max_sweeps": args.max_sweeps,
        "num_probability_buckets": args.num_probability_buckets,
        "alpha": args.alpha,
        "beta": args.beta,
        "max_epochs": args.max_epochs,
        "rel_delta_tol": args.rel_delta_tol,
        "num_samples": num_samples,
        "seed": args.seed,
        "initial_weights": list(args.initial_weights),
        "sample_points": args.sample_points,
        "output_dir": args.output_dir,
    }


def cmd_embed(args) -> int:
    graph, labels = _load(args)
    num_samples = args.num_samples
    if num_samples is None:
        num_samples = min(graph.num_nodes, 256)
    num_samples = min(num_samples, graph.num_nodes)

    run = run_embedding(
        graph,
        labels,
        max_hops=args.max_hops,
        max_forks_perhop=args.max_forks_perhop,
        max_edges_perfork=args.max_edges_perfork,
        max_num_clusters=args.max_num_clusters,
        eigen_cfg=EigenConfig(
            residual_tol=args.residual_tol, max_iterations=args.max_iterations
        ),
        rank_cfg=RankConfig(
            ranking_factor=args.ranking_factor,
            convergence_tol=args.convergence_tol,
            max_sweeps=args.max_sweeps,
            num_probability_buckets=args.num_probability_buckets,
        ),
        train_cfg=TrainConfig(
            alpha=args.alpha,
            learning_rate=args.beta,
            max_epochs=args.max_epochs,
            rel_delta_tol=args.rel_delta_tol,
            num_samples=num_samples,
            rng_seed=args.seed,
            initial_weights=tuple(args.initial_weights),
        ),
    )

    out = ensure_directory(args.output_dir)
    write_embeddings_csv(run.table, out / EMBEDDINGS_FILE)
    write_loss_history_csv(run.weights, out / LOSS_HISTORY_FILE)
    write_sidecar_json(run, _config_snapshot(args, num_samples), out / SIDECAR_FILE)

    if args.sample_points is not None:
        pairs = parse_pair_list(args.sample_points)
        rows = _table_pair_rows(run, pairs)
        write_similarity_csv(rows, out / PAIR_SIMILARITY_FILE)
    return 0


def _table_pair_rows(run: EmbeddingRun, pairs):
    rows = []
    for id_a, id_b in pairs:
        ia, ib = run.graph.node_index(id_a), run.graph.node_index(id_b)
        rows.append((id_a, id_b, run.table.cosine(ia, ib)))
    return rows


def cmd_cluster(args) -> int:
    graph, _labels = _load(args)
    clusters = rsb_partition(
        graph,
        args.max_num_clusters,
        EigenConfig(residual_tol=args.residual_tol, max_iterations=args.max_iterations),
    )
    write_clusters_csv(graph, clusters, args.output)
    return 0


def cmd_rank(args) -> int:
    graph, _labels = _load(args)
    probs = solve_transitional_probabilities(
        graph,
        RankConfig(
            ranking_factor=args.ranking_factor,
            convergence_tol=args.convergence_tol,
            max_sweeps=args.max_sweeps,
            num_probability_buckets=args.num_probability_buckets,
        ),
    )
    write_probabilities_csv(graph, probs, args.output)
    return 0


def cmd_similarity(args) -> int:
    ids, matrix = read_embeddings_csv(args.embeddings)
    if args.pairs is not None:
        rows = pair_similarities(ids, matrix, parse_pair_list(args.pairs))
    else:
        rows = top_k_similar(ids, matrix, args.query, args.top_k)
    write_similarity_csv(rows, args.output)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GraphVecError as err:
        line = json.dumps({"error": type(err).__name__, "message": str(err)})
        sys.stderr.write(line + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
