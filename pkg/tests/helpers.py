"""Graph builders shared across the test suite."""

import numpy as np

import graphvec as gv


def ids(indices):
    return [f"n{i}" for i in indices]


def make_graph(n, edges, labels=None, undirected=False):
    """Build a graph over nodes n0..n{n-1} from integer edge tuples.

    ``edges`` holds (src, dst) or (src, dst, weight); ``labels`` maps node
    index -> list of label strings.
    """
    labels = labels or {}
    node_rows = [(f"n{i}", labels.get(i, [])) for i in range(n)]
    edge_rows = [
        (f"n{e[0]}", f"n{e[1]}", float(e[2]) if len(e) > 2 else 1.0) for e in edges
    ]
    return gv.build_graph(node_rows, edge_rows, undirected=undirected)


def path_edges(n):
    return [(i, i + 1) for i in range(n - 1)]


def path_graph(n, **kwargs):
    return make_graph(n, path_edges(n), **kwargs)


def star_graph(num_leaves):
    """Node 0 is the center."""
    return make_graph(num_leaves + 1, [(0, i + 1) for i in range(num_leaves)])


def complete_graph(n):
    return make_graph(n, [(i, k) for i in range(n) for k in range(i + 1, n)])


def random_digraph(rng, n, edge_prob=0.25, self_loops=False):
    """Random unit-weight digraph; returns (graph, labels, edge list)."""
    edges = []
    for i in range(n):
        for k in range(n):
            if i == k and not self_loops:
                continue
            if rng.random() < edge_prob:
                edges.append((i, k))
    graph, labels = make_graph(n, edges)
    return graph, labels, edges


def random_connected_graph(rng, n, extra_edge_prob=0.15):
    """Random spanning tree plus extra edges; always connected."""
    edges = []
    for i in range(1, n):
        edges.append((int(rng.integers(0, i)), i))
    for i in range(n):
        for k in range(i + 1, n):
            if rng.random() < extra_edge_prob:
                edges.append((i, k))
    graph, labels = make_graph(n, edges)
    return graph, labels, edges


def random_labeled_graph(rng, n, edge_prob=0.02, num_label_kinds=12):
    """Random digraph whose nodes carry 0..3 labels from a small pool."""
    label_pool = [f"L{j}" for j in range(num_label_kinds)]
    labels = {}
    for i in range(n):
        count = int(rng.integers(0, 4))
        if count:
            picks = rng.choice(num_label_kinds, size=count, replace=False)
            labels[i] = [label_pool[j] for j in picks]
    edges = []
    for i in range(n):
        for k in range(n):
            if i != k and rng.random() < edge_prob:
                edges.append((i, k))
    return make_graph(n, edges, labels=labels)


def clique_chain_graph(num_cliques=8, clique_size=6):
    """Cliques connected in a chain; each clique carries its own label."""
    n = num_cliques * clique_size
    edges = []
    labels = {}
    for c in range(num_cliques):
        base = c * clique_size
        for i in range(clique_size):
            labels[base + i] = [f"clique{c}"]
            for k in range(i + 1, clique_size):
                edges.append((base + i, base + k))
        if c:
            edges.append((base - 1, base))
    return make_graph(n, edges, labels=labels)


def star_forest_graph(star_sizes=(4, 6, 8, 5, 7, 9)):
    """Disjoint stars; hubs and leaves carry distinguishing labels."""
    edges = []
    labels = {}
    base = 0
    for s, size in enumerate(star_sizes):
        labels[base] = [f"hub{s}", "hub"]
        for leaf in range(1, size + 1):
            labels[base + leaf] = [f"hub{s}"]
            edges.append((base, base + leaf))
        base += size + 1
    return make_graph(base, edges, labels=labels)
