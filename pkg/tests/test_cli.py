import csv
import json

import numpy as np
import pytest

from graphvec.cli import main
from graphvec.pipeline import read_embeddings_csv

from oracles import cosine_oracle


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


@pytest.fixture()
def chess_embed_dir(tmp_path_factory, chess_paths):
    """One default embed run shared by the read-only CLI tests."""
    nodes, edges = chess_paths
    out = tmp_path_factory.mktemp("embed")
    code = main(
        ["embed", "--nodes", nodes, "--edges", edges, "--output_dir", str(out)]
    )
    assert code == 0
    return out


class TestEmbedCommand:
    def test_output_shapes(self, chess_embed_dir):
        rows = read_csv(chess_embed_dir / "embeddings.csv")
        sidecar = json.loads((chess_embed_dir / "embedding_run.json").read_text())
        assert len(rows) == 1 + 10  # header + one row per node
        assert len(rows[0]) == 1 + sidecar["layout"]["total_size"]
        assert rows[0][0] == "node_id"
        history = read_csv(chess_embed_dir / "loss_history.csv")
        assert history[0] == ["epoch", "mean_loss", "w0", "w1", "w2", "w3"]
        assert len(history) >= 2

    def test_sidecar_round_trips_flags(self, capsys, chess_paths, tmp_path):
        nodes, edges = chess_paths
        out = tmp_path / "run"
        code, _, _ = run_cli(
            capsys,
            "embed",
            "--nodes", nodes,
            "--edges", edges,
            "--output_dir", str(out),
            "--max_hops", "2",
            "--max_forks_perhop", "3",
            "--max_edges_perfork", "5",
            "--max_num_clusters", "4",
            "--num_probability_buckets", "6",
            "--ranking_factor", "0.2",
            "--convergence_tol", "1e-8",
            "--max_sweeps", "500",
            "--residual_tol", "1e-7",
            "--max_iterations", "5000",
            "--alpha", "0.7",
            "--beta", "0.01",
            "--max_epochs", "20",
            "--rel_delta_tol", "0.01",
            "--num_samples", "8",
            "--seed", "5",
            "--initial_weights", "1,2,3,4",
            "--undirected",
        )
        assert code == 0
        config = json.loads((out / "embedding_run.json").read_text())["config"]
        assert config["max_hops"] == 2
        assert config["max_forks_perhop"] == 3
        assert config["max_edges_perfork"] == 5
        assert config["max_num_clusters"] == 4
        assert config["num_probability_buckets"] == 6
        assert config["ranking_factor"] == 0.2
        assert config["convergence_tol"] == 1e-8
        assert config["max_sweeps"] == 500
        assert config["residual_tol"] == 1e-7
        assert config["max_iterations"] == 5000
        assert config["alpha"] == 0.7
        assert config["beta"] == 0.01
        assert config["max_epochs"] == 20
        assert config["rel_delta_tol"] == 0.01
        assert config["num_samples"] == 8
        assert config["seed"] == 5
        assert config["initial_weights"] == [1.0, 2.0, 3.0, 4.0]
        assert config["undirected"] is True
        sidecar = json.loads((out / "embedding_run.json").read_text())
        total = sidecar["layout"]["total_size"]
        assert total == 2 * 3 * 5 + sidecar["layout"]["num_labels"] + 4 + 6

    def test_sample_points(self, capsys, chess_paths, tmp_path):
        nodes, edges = chess_paths
        out = tmp_path / "run"
        code, _, _ = run_cli(
            capsys,
            "embed",
            "--nodes", nodes,
            "--edges", edges,
            "--output_dir", str(out),
            "--sample_points", "Bill:Susan",
        )
        assert code == 0
        rows = read_csv(out / "pair_similarity.csv")
        assert rows[0] == ["node_a", "node_b", "similarity"]
        assert len(rows) == 2
        assert rows[1][0] == "Bill" and rows[1][1] == "Susan"

    def test_sample_points_unknown_node(self, capsys, chess_paths, tmp_path):
        nodes, edges = chess_paths
        code, _, err = run_cli(
            capsys,
            "embed",
            "--nodes", nodes,
            "--edges", edges,
            "--output_dir", str(tmp_path / "x"),
            "--sample_points", "Bill:Zorro",
        )
        assert code == 1
        payload = json.loads(err.strip())
        assert payload["error"] == "UnknownNodeError"
        assert "Zorro" in payload["message"]

    def test_rerun_is_byte_identical(self, capsys, chess_paths, tmp_path):
        nodes, edges = chess_paths
        out = tmp_path / "run"
        argv = (
            "embed",
            "--nodes", nodes,
            "--edges", edges,
            "--output_dir", str(out),
            "--seed", "3",
            "--sample_points", "Alex:Tom",
        )
        names = (
            "embeddings.csv",
            "embedding_run.json",
            "loss_history.csv",
            "pair_similarity.csv",
        )
        code, _, _ = run_cli(capsys, *argv)
        assert code == 0
        first = {name: (out / name).read_bytes() for name in names}
        code, _, _ = run_cli(capsys, *argv)
        assert code == 0
        for name in names:
            assert (out / name).read_bytes() == first[name]


class TestClusterAndRankCommands:
    def test_cluster_output(self, capsys, chess_paths, tmp_path):
        nodes, edges = chess_paths
        out = tmp_path / "clusters.csv"
        code, _, _ = run_cli(
            capsys, "cluster", "--nodes", nodes, "--edges", edges, "--output", str(out)
        )
        assert code == 0
        rows = read_csv(out)
        assert rows[0] == ["node_id", "cluster_index"]
        assert len(rows) == 11
        indices = sorted({int(r[1]) for r in rows[1:]})
        assert indices == list(range(len(indices)))

    def test_rank_output_sums_to_one(self, capsys, chess_paths, tmp_path):
        nodes, edges = chess_paths
        out = tmp_path / "rank.csv"
        code, _, _ = run_cli(
            capsys, "rank", "--nodes", nodes, "--edges", edges, "--output", str(out)
        )
        assert code == 0
        rows = read_csv(out)
        assert rows[0] == ["node_id", "probability"]
        total = sum(float(r[1]) for r in rows[1:])
        assert abs(total - 1.0) < 1e-9

    def test_empty_graph_is_clean_error(self, capsys, tmp_path):
        nodes = tmp_path / "n.csv"
        nodes.write_text("node_id,labels\n", encoding="utf-8")
        edges = tmp_path / "e.csv"
        edges.write_text("src,dst\n", encoding="utf-8")
        code, _, err = run_cli(
            capsys,
            "cluster",
            "--nodes", str(nodes),
            "--edges", str(edges),
            "--output", str(tmp_path / "out.csv"),
        )
        assert code == 1
        payload = json.loads(err.strip())
        assert payload["error"] == "ValidationError"

    def test_malformed_edges_reports_line(self, capsys, tmp_path):
        edges = tmp_path / "e.csv"
        edges.write_text("src,dst\nA,B\nA\n", encoding="utf-8")
        code, _, err = run_cli(
            capsys, "rank", "--edges", str(edges), "--output", str(tmp_path / "o.csv")
        )
        assert code == 1
        payload = json.loads(err.strip())
        assert payload["error"] == "ParseError"
        assert "line 3" in payload["message"]


class TestSimilarityCommand:
    def test_pairs_mode_matches_oracle(self, capsys, chess_embed_dir, tmp_path):
        out = tmp_path / "sim.csv"
        code, _, _ = run_cli(
            capsys,
            "similarity",
            "--embeddings", str(chess_embed_dir / "embeddings.csv"),
            "--pairs", "Alex:Tom,Alex:Alex",
            "--output", str(out),
        )
        assert code == 0
        rows = read_csv(out)
        ids, matrix = read_embeddings_csv(chess_embed_dir / "embeddings.csv")
        lookup = {node_id: row for node_id, row in zip(ids, matrix)}
        expected = cosine_oracle(lookup["Alex"], lookup["Tom"])
        assert float(rows[1][2]) == pytest.approx(expected, abs=1e-9)
        assert float(rows[2][2]) == pytest.approx(1.0, abs=1e-9)

    def test_top_k_excludes_self_and_sorts(self, capsys, chess_embed_dir, tmp_path):
        out = tmp_path / "top.csv"
        code, _, _ = run_cli(
            capsys,
            "similarity",
            "--embeddings", str(chess_embed_dir / "embeddings.csv"),
            "--query", "Alex",
            "--top_k", "4",
            "--output", str(out),
        )
        assert code == 0
        rows = read_csv(out)[1:]
        assert len(rows) == 4
        assert all(r[0] == "Alex" for r in rows)
        assert all(r[1] != "Alex" for r in rows)
        sims = [float(r[2]) for r in rows]
        assert sims == sorted(sims, reverse=True)

    def test_top_k_ties_break_by_node_id(self, capsys, tmp_path):
        path = tmp_path / "emb.csv"
        path.write_text(
            "node_id,v0,v1\nq,1,0\nb,1,0\na,1,0\nz,0,1\n", encoding="utf-8"
        )
        out = tmp_path / "sim.csv"
        code, _, _ = run_cli(
            capsys,
            "similarity",
            "--embeddings", str(path),
            "--query", "q",
            "--top_k", "3",
            "--output", str(out),
        )
        assert code == 0
        rows = read_csv(out)[1:]
        assert [r[1] for r in rows] == ["a", "b", "z"]
        assert [float(r[2]) for r in rows] == [1.0, 1.0, 0.0]

    def test_orthogonal_one_hots(self, capsys, tmp_path):
        path = tmp_path / "emb.csv"
        path.write_text("node_id,v0,v1\nA,1,0\nB,0,1\n", encoding="utf-8")
        out = tmp_path / "sim.csv"
        code, _, _ = run_cli(
            capsys,
            "similarity",
            "--embeddings", str(path),
            "--pairs", "A:B",
            "--output", str(out),
        )
        assert code == 0
        assert float(read_csv(out)[1][2]) == 0.0

    def test_unknown_query_node(self, capsys, chess_embed_dir, tmp_path):
        code, _, err = run_cli(
            capsys,
            "similarity",
            "--embeddings", str(chess_embed_dir / "embeddings.csv"),
            "--query", "Zorro",
            "--output", str(tmp_path / "s.csv"),
        )
        assert code == 1
        assert json.loads(err.strip())["error"] == "UnknownNodeError"

    def test_dimension_mismatch(self, capsys, tmp_path):
        path = tmp_path / "emb.csv"
        path.write_text("node_id,v0,v1\nA,1,0\nB,1\n", encoding="utf-8")
        code, _, err = run_cli(
            capsys,
            "similarity",
            "--embeddings", str(path),
            "--pairs", "A:B",
            "--output", str(tmp_path / "s.csv"),
        )
        assert code == 1
        assert json.loads(err.strip())["error"] == "ValidationError"

    def test_bad_pair_format(self, capsys, chess_embed_dir, tmp_path):
        code, _, err = run_cli(
            capsys,
            "similarity",
            "--embeddings", str(chess_embed_dir / "embeddings.csv"),
            "--pairs", "AlexTom",
            "--output", str(tmp_path / "s.csv"),
        )
        assert code == 1
        assert json.loads(err.strip())["error"] == "ValidationError"

    def test_emitted_vectors_unit_norm_and_cosine_equals_dot(self, chess_embed_dir):
        ids, matrix = read_embeddings_csv(chess_embed_dir / "embeddings.csv")
        norms = np.linalg.norm(matrix, axis=1)
        nonzero = norms > 0
        np.testing.assert_allclose(norms[nonzero], 1.0, atol=1e-9)
        for i in range(0, len(ids), 3):
            for k in range(i, len(ids), 2):
                dot = float(matrix[i] @ matrix[k])
                cos = cosine_oracle(matrix[i], matrix[k])
                assert abs(dot - cos) < 1e-9
