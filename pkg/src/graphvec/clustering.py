"""Recursive spectral bisection of the graph Laplacian.

Each connected part is split at the median of its Fiedler ordering until the
requested power-of-two cluster count is reached.  Disconnected parts are
first split along connected components.  The whole procedure is a pure
function of the graph: it uses a fixed internal start vector and never sees
user seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import SolverError, ValidationError
from .graph import Graph

# Seed of the deterministic start vector; fixed so partitions depend only on
# the graph.
_START_SEED = 0x5EED

SplitHook = Callable[[list[int], list[int], list[int], bool], None]


@dataclass(frozen=True)
class EigenConfig:
    """Convergence contract for the Fiedler eigensolver."""

    residual_tol: float = 1e-8
    max_iterations: int = 10000

    def __post_init__(self):
        if self.residual_tol <= 0:
            raise ValidationError("residual_tol must be positive")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be at least 1")


@dataclass
class ClusterAssignment:
    """Dense cluster index per node; indices are contiguous from 0."""

    cluster_of: list[int]
    num_clusters: int

    def members(self) -> list[list[int]]:
        """Node indices grouped by cluster, each group sorted."""
        groups: list[list[int]] = [[] for _ in range(self.num_clusters)]
        for node, c in enumerate(self.cluster_of):
            groups[c].append(node)
        return groups


def laplacian_matrix(graph: Graph, nodes: Sequence[int]) -> np.ndarray:
    """Dense Laplacian L = D - A of the symmetrized, unit-weight subgraph.

    Parallel edges collapse to a single unit entry and self-loops are
    ignored, so L depends only on which node pairs are connected.
    """
    pos = {node: i for i, node in enumerate(nodes)}
    n = len(nodes)
    adj = np.zeros((n, n))
    for u in nodes:
        iu = pos[u]
        for v, _w in graph.out_adjacency[u]:
            iv = pos.get(v)
            if iv is not None and iv != iu:
                adj[iu, iv] = 1.0
                adj[iv, iu] = 1.0
    lap = np.diag(adj.sum(axis=1)) - adj
    return lap


def connected_components(graph: Graph, nodes: Sequence[int]) -> list[list[int]]:
    """Connected components of the induced undirected subgraph.

    Components are sorted internally and ordered by their smallest node.
    """
    member = set(nodes)
    unseen = set(nodes)
    components: list[list[int]] = []
    for seed in sorted(nodes):
        if seed not in unseen:
            continue
        comp = [seed]
        unseen.discard(seed)
        queue = [seed]
        while queue:
            u = queue.pop()
            for v in graph.neighbors_undirected(u):
                if v in unseen and v in member:
                    unseen.discard(v)
                    comp.append(v)
                    queue.append(v)
        components.append(sorted(comp))
    return components


def fiedler_vector(
    graph: Graph,
    nodes: Sequence[int] | None = None,
    cfg: EigenConfig | None = None,
) -> np.ndarray:
    """Approximate eigenvector of the second-smallest Laplacian eigenvalue.

    The returned unit vector ``v`` is aligned with ``nodes`` (all nodes when
    omitted), is orthogonal to the all-ones vector, satisfies
    ``||L v - lambda v|| <= residual_tol`` with ``lambda = v' L v``, and has
    its first non-negligible component positive.

    Solved by inverse iteration on ``L + J/n`` (J the all-ones matrix),
    which is positive definite on a connected subgraph and leaves the
    spectrum of L untouched on the complement of the ones vector.  Raises
    :class:`SolverError` with the last residual on non-convergence.
    """
    cfg = cfg or EigenConfig()
    nodes = sorted(range(graph.num_nodes)) if nodes is None else list(nodes)
    n = len(nodes)
    if n < 2:
        raise ValidationError("fiedler_vector needs a subgraph of at least 2 nodes")
    if len(connected_components(graph, nodes)) > 1:
        raise ValidationError("fiedler_vector needs a connected subgraph")

    lap = laplacian_matrix(graph, nodes)
    shifted = lap + np.full((n, n), 1.0 / n)
    try:
        factor = cho_factor(shifted)
    except LinAlgError as err:  # pragma: no cover - guarded by connectivity
        raise SolverError(f"Laplacian factorization failed: {err}") from err

    rng = np.random.default_rng(_START_SEED)
    v = rng.standard_normal(n)
    v -= v.mean()
    norm = np.linalg.norm(v)
    if norm < 1e-12:  # pragma: no cover - needs an astronomically rare draw
        v = np.arange(n, dtype=float)
        v -= v.mean()
        norm = np.linalg.norm(v)
    v /= norm

    residual = math.inf
    for _ in range(cfg.max_iterations):
        lap_v = lap @ v
        lam = float(v @ lap_v)
        residual = float(np.linalg.norm(lap_v - lam * v))
        if residual <= cfg.residual_tol:
            return _fix_sign(v)
        y = cho_solve(factor, v)
        y -= y.mean()
        norm = np.linalg.norm(y)
        if norm == 0.0:  # pragma: no cover - cannot happen for SPD solves
            raise SolverError("inverse iteration collapsed to zero", residual)
        v = y / norm

    lap_v = lap @ v
    lam = float(v @ lap_v)
    residual = float(np.linalg.norm(lap_v - lam * v))
    if residual <= cfg.residual_tol:
        return _fix_sign(v)
    raise SolverError(
        f"Fiedler solver did not reach residual {cfg.residual_tol:g} in "
        f"{cfg.max_iterations} iterations (last residual {residual:.3e})",
        residual=residual,
    )


def _fix_sign(v: np.ndarray) -> np.ndarray:
    for x in v:
        if abs(x) > 1e-12:
            return -v if x < 0 else v
    return v


def rsb_partition(
    graph: Graph,
    num_clusters: int,
    cfg: EigenConfig | None = None,
    split_hook: SplitHook | None = None,
) -> ClusterAssignment:
    """Partition the graph into ``num_clusters`` (a power of two) clusters.

    Connected parts are sorted by Fiedler value (ties by node index) and cut
    at the median into halves whose sizes differ by at most one; disconnected
    parts are split by grouping components greedily into two halves by size.
    Cluster indices follow the depth-first order of the recursion leaves, so
    the result is fully deterministic.  Parts smaller than 2 nodes stop
    splitting early, which keeps leaf indices dense.

    ``split_hook(part, left, right, spectral)`` is a diagnostic callback
    invoked at every split.
    """
    if num_clusters < 1 or num_clusters & (num_clusters - 1):
        raise ValidationError(
            f"num_clusters must be a power of two >= 1, got {num_clusters}"
        )
    cfg = cfg or EigenConfig()
    levels = num_clusters.bit_length() - 1

    cluster_of = [0] * graph.num_nodes
    leaf_counter = 0
    if graph.num_nodes == 0:
        return ClusterAssignment(cluster_of=[], num_clusters=0)

    def recurse(part: list[int], depth: int) -> None:
        nonlocal leaf_counter
        if depth == levels or len(part) < 2:
            for node in part:
                cluster_of[node] = leaf_counter
            leaf_counter += 1
            return
        components = connected_components(graph, part)
        if len(components) > 1:
            left, right = _component_halves(components)
            spectral = False
        else:
            values = fiedler_vector(graph, part, cfg)
            order = [node for _v, node in sorted(zip(values, part))]
            half = (len(order) + 1) // 2
            left, right = sorted(order[:half]), sorted(order[half:])
            spectral = True
        if split_hook is not None:
            split_hook(part, left, right, spectral)
        recurse(left, depth + 1)
        recurse(right, depth + 1)

    recurse(sorted(range(graph.num_nodes)), 0)
    return ClusterAssignment(cluster_of=cluster_of, num_clusters=leaf_counter)


def _component_halves(components: list[list[int]]) -> tuple[list[int], list[int]]:
    """Greedily group components into two halves balanced by node count."""
    ordered = sorted(components, key=lambda comp: (-len(comp), comp[0]))
    halves: tuple[list[int], list[int]] = ([], [])
    for comp in ordered:
        target = 0 if len(halves[0]) <= len(halves[1]) else 1
        halves[target].extend(comp)
    return sorted(halves[0]), sorted(halves[1])
