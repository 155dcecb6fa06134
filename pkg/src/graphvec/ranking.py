"""Damped random-walk probabilities over incoming edge weights.

The fixed point of the synchronous sweep

    p_i <- (1 - r) * sum_{j in B(i)} p_j * w(j -> i) / W_out(j) + r / NV

is solved by Jacobi iteration from the uniform start; mass of dangling nodes
(zero total outgoing weight) is redistributed uniformly, so the vector sums
to one after every sweep.  With uniform edge weights this is exactly a
Pagerank solve with damping ``1 - r``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError, ValidationError
from .graph import Graph


@dataclass(frozen=True)
class RankConfig:
    """Solver options for the probability ranking sweep."""

    ranking_factor: float = 0.15
    convergence_tol: float = 1e-9
    max_sweeps: int = 1000
    num_probability_buckets: int = 10

    def __post_init__(self):
        if not 0.0 < self.ranking_factor < 1.0:
            raise ValidationError("ranking_factor must lie strictly between 0 and 1")
        if self.convergence_tol <= 0:
            raise ValidationError("convergence_tol must be positive")
        if self.max_sweeps < 1:
            raise ValidationError("max_sweeps must be at least 1")
        if self.num_probability_buckets < 1:
            raise ValidationError("num_probability_buckets must be at least 1")


@dataclass
class ProbabilityVector:
    """Per-node steady-state probabilities; nonnegative, summing to one."""

    p: np.ndarray


class TransitionOperator:
    """Edge arrays precomputed for vectorized synchronous sweeps."""

    def __init__(self, graph: Graph):
        src: list[int] = []
        dst: list[int] = []
        wgt: list[float] = []
        for u, adj in enumerate(graph.out_adjacency):
            for v, w in adj:
                src.append(u)
                dst.append(v)
                wgt.append(w)
        self.num_nodes = graph.num_nodes
        src_arr = np.asarray(src, dtype=np.intp)
        dst_arr = np.asarray(dst, dtype=np.intp)
        wgt_arr = np.asarray(wgt, dtype=float)
        out_weight = np.bincount(src_arr, weights=wgt_arr, minlength=graph.num_nodes)
        # Nodes whose total outgoing weight is zero are dangling (this
        # includes nodes with only zero-weight edges); their edges carry no
        # flux.
        active = out_weight[src_arr] > 0
        self.src = src_arr[active]
        self.dst = dst_arr[active]
        self.ratio = wgt_arr[active] / out_weight[self.src]
        self.dangling = out_weight == 0

    def sweep(self, p: np.ndarray, ranking_factor: float) -> np.ndarray:
        """One synchronous update; preserves the unit sum exactly."""
        n = self.num_nodes
        inflow = np.bincount(self.dst, weights=p[self.src] * self.ratio, minlength=n)
        spread = p[self.dangling].sum() / n
        return (1.0 - ranking_factor) * (inflow + spread) + ranking_factor / n


def solve_transitional_probabilities(
    graph: Graph, cfg: RankConfig | None = None
) -> ProbabilityVector:
    """Iterate sweeps from the uniform start until ``max |dp| < tol``.

    Raises :class:`SolverError` carrying the last max-delta when the sweep
    count hits ``max_sweeps`` without converging.
    """
    cfg = cfg or RankConfig()
    if graph.num_nodes < 1:
        raise ValidationError("graph must have at least one node")
    op = TransitionOperator(graph)
    p = np.full(graph.num_nodes, 1.0 / graph.num_nodes)
    delta = np.inf
    for _ in range(cfg.max_sweeps):
        p_next = op.sweep(p, cfg.ranking_factor)
        delta = float(np.max(np.abs(p_next - p)))
        p = p_next
        if delta < cfg.convergence_tol:
            return ProbabilityVector(p=p)
    raise SolverError(
        f"probability ranking did not converge in {cfg.max_sweeps} sweeps "
        f"(last max delta {delta:.3e})",
        residual=delta,
    )


def probability_bucket(p_scaled: float, num_buckets: int) -> int:
    """Bucket index of a min-max scaled probability on the unit range.

    Buckets partition [0, 1] equally; the value 1.0 is clamped into the last
    bucket.
    """
    if num_buckets < 1:
        raise ValidationError("num_buckets must be at least 1")
    if not 0.0 <= p_scaled <= 1.0:
        raise ValidationError(f"scaled probability {p_scaled} outside [0, 1]")
    return min(int(p_scaled * num_buckets), num_buckets - 1)


def min_max_scale(p: np.ndarray) -> np.ndarray:
    """Scale values linearly onto [0, 1]; all-equal inputs map to 0."""
    p = np.asarray(p, dtype=float)
    lo, hi = float(p.min()), float(p.max())
    if hi == lo:
        return np.zeros_like(p)
    return (p - lo) / (hi - lo)
