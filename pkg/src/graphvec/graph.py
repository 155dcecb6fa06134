"""Directed weighted graph with interned node ids and per-node label sets.

Nodes and edges come from CSV files (or programmatic row lists).  Dense node
indices are assigned in first-appearance order: rows of the nodes file first,
then edge endpoints as they are encountered.  The loaded graph is immutable;
every solver in this package only reads it, so concurrent reads are safe.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ParseError, UnknownNodeError, ValidationError

LABEL_SEPARATOR = "|"

_NODE_HEADERS = (["node_id"], ["node_id", "labels"])
_EDGE_HEADERS = (
    ["src", "dst"],
    ["src", "dst", "weight"],
    ["src", "dst", "weight", "label"],
)


@dataclass
class Graph:
    """Immutable adjacency, indexable in both directions.

    ``out_adjacency[i]`` and ``in_adjacency[i]`` hold ``(neighbor, weight)``
    pairs sorted by neighbor index; the two describe the same edge multiset.
    Parallel edges are kept as-is and self-loops are stored but excluded from
    :meth:`neighbors_undirected`.
    """

    num_nodes: int
    node_ids: list[str]
    out_adjacency: list[list[tuple[int, float]]]
    in_adjacency: list[list[tuple[int, float]]]
    index_of: dict[str, int]
    # (src_id, dst_id, label) triples kept for provenance only; no solver
    # reads edge labels.
    edge_labels: list[tuple[str, str, str]] = field(default_factory=list)

    _undirected: list[list[int]] | None = field(
        default=None, init=False, repr=False, compare=False
    )

    @property
    def num_edges(self) -> int:
        """Number of stored directed edges (doubled by undirected loading)."""
        return sum(len(adj) for adj in self.out_adjacency)

    def node_index(self, node_id: str) -> int:
        """Dense index of an external node id."""
        try:
            return self.index_of[node_id]
        except KeyError:
            raise UnknownNodeError(f"unknown node id {node_id!r}") from None

    def neighbors_undirected(self, i: int) -> list[int]:
        """Sorted union of out- and in-neighbors of ``i``, self excluded.

        Built lazily for the whole graph on first use; treat the returned
        list as read-only.
        """
        if self._undirected is None:
            sets: list[set[int]] = [set() for _ in range(self.num_nodes)]
            for u, adj in enumerate(self.out_adjacency):
                for v, _w in adj:
                    if u != v:
                        sets[u].add(v)
                        sets[v].add(u)
            self._undirected = [sorted(s) for s in sets]
        return self._undirected[i]


@dataclass
class LabelRegistry:
    """Bidirectional map between label strings and dense label indices.

    Indices are assigned in first-appearance order over the nodes file and
    count only labels attached to at least one node.
    """

    label_index: dict[str, int]
    node_labels: list[tuple[int, ...]]

    @property
    def num_labels(self) -> int:
        return len(self.label_index)

    def labels_of(self, i: int) -> tuple[int, ...]:
        """Sorted label indices of node ``i``."""
        return self.node_labels[i]

    def common_labels(self, i: int, k: int) -> int:
        """Number of labels shared by nodes ``i`` and ``k``."""
        return len(set(self.node_labels[i]) & set(self.node_labels[k]))


def build_graph(
    node_rows: Iterable[tuple[str, Sequence[str]]],
    edge_rows: Iterable[tuple],
    undirected: bool = False,
) -> tuple[Graph, LabelRegistry]:
    """Construct a graph from programmatic node and edge rows.

    ``node_rows`` yields ``(node_id, labels)`` pairs; ``edge_rows`` yields
    ``(src, dst)``, ``(src, dst, weight)`` or ``(src, dst, weight, label)``
    tuples.  Node ids referenced only by edges are auto-created with empty
    label sets.  With ``undirected`` set, every input edge is materialized in
    both directions with equal weight.
    """
    index_of: dict[str, int] = {}
    node_ids: list[str] = []
    labels_per_node: list[tuple[int, ...]] = []
    label_index: dict[str, int] = {}

    def intern(node_id: str) -> int:
        idx = index_of.get(node_id)
        if idx is None:
            idx = len(node_ids)
            index_of[node_id] = idx
            node_ids.append(node_id)
            labels_per_node.append(())
        return idx

    for node_id, label_strings in node_rows:
        if not node_id:
            raise ValidationError("empty node id in nodes input")
        if node_id in index_of:
            raise ValidationError(f"duplicate node id {node_id!r} in nodes input")
        idx = intern(node_id)
        indices: list[int] = []
        for lab in label_strings:
            if lab not in label_index:
                label_index[lab] = len(label_index)
            li = label_index[lab]
            if li not in indices:
                indices.append(li)
        labels_per_node[idx] = tuple(sorted(indices))

    directed: list[tuple[int, int, float]] = []
    edge_labels: list[tuple[str, str, str]] = []
    for row in edge_rows:
        src, dst = row[0], row[1]
        weight = float(row[2]) if len(row) > 2 else 1.0
        if not src or not dst:
            raise ValidationError("empty node id in edges input")
        if weight < 0:
            raise ValidationError(
                f"negative edge weight {weight} on edge {src!r} -> {dst!r}"
            )
        si, di = intern(src), intern(dst)
        directed.append((si, di, weight))
        if undirected:
            directed.append((di, si, weight))
        if len(row) > 3 and row[3]:
            edge_labels.append((src, dst, row[3]))

    out_adjacency: list[list[tuple[int, float]]] = [[] for _ in node_ids]
    in_adjacency: list[list[tuple[int, float]]] = [[] for _ in node_ids]
    for si, di, weight in directed:
        out_adjacency[si].append((di, weight))
        in_adjacency[di].append((si, weight))
    for adj in out_adjacency:
        adj.sort()
    for adj in in_adjacency:
        adj.sort()

    graph = Graph(
        num_nodes=len(node_ids),
        node_ids=node_ids,
        out_adjacency=out_adjacency,
        in_adjacency=in_adjacency,
        index_of=index_of,
        edge_labels=edge_labels,
    )
    return graph, LabelRegistry(label_index=label_index, node_labels=labels_per_node)


def load_graph(
    nodes_path: str | None,
    edges_path: str,
    undirected: bool = False,
) -> tuple[Graph, LabelRegistry]:
    """Load a graph from CSV files.

    The nodes file is optional (header ``node_id,labels``, labels separated
    by ``|``); the edges file header is ``src,dst[,weight[,label]]`` with
    weight defaulting to 1.0.  Raises :class:`ParseError` for malformed rows
    (with the line number) and :class:`ValidationError` for duplicate node
    ids or negative weights.
    """
    node_rows: list[tuple[str, list[str]]] = []
    seen: set[str] = set()
    if nodes_path is not None:
        for line_num, row in _csv_rows(nodes_path, _NODE_HEADERS, "nodes"):
            node_id = row[0]
            raw = row[1] if len(row) > 1 else ""
            labels = [lab for lab in raw.split(LABEL_SEPARATOR) if lab]
            if not node_id:
                raise ValidationError(f"empty node id (nodes line {line_num})")
            if node_id in seen:
                raise ValidationError(
                    f"duplicate node id {node_id!r} (nodes line {line_num})"
                )
            seen.add(node_id)
            node_rows.append((node_id, labels))

    edge_rows: list[tuple] = []
    for line_num, row in _csv_rows(edges_path, _EDGE_HEADERS, "edges"):
        src, dst = row[0], row[1]
        if not src or not dst:
            raise ValidationError(f"empty node id (edges line {line_num})")
        weight = 1.0
        if len(row) > 2 and row[2] != "":
            try:
                weight = float(row[2])
            except ValueError:
                raise ParseError(
                    f"invalid weight {row[2]!r}", line_number=line_num
                ) from None
        if weight < 0:
            raise ValidationError(
                f"negative edge weight {weight} (edges line {line_num})"
            )
        label = row[3] if len(row) > 3 else ""
        edge_rows.append((src, dst, weight, label))

    return build_graph(node_rows, edge_rows, undirected=undirected)


def _csv_rows(path, allowed_headers, kind):
    """Yield (line_number, row) for data rows, validating the header."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = None
        for row in reader:
            if not row or (len(row) == 1 and row[0] == ""):
                continue
            if header is None:
                if row not in allowed_headers:
                    expected = " or ".join(
                        ",".join(h) for h in allowed_headers
                    )
                    raise ParseError(
                        f"unexpected {kind} header {','.join(row)!r}; "
                        f"expected {expected}",
                        line_number=reader.line_num,
                    )
                header = row
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"expected {len(header)} columns, got {len(row)}",
                    line_number=reader.line_num,
                )
            yield reader.line_num, row
    if header is None:
        raise ParseError(f"{kind} file is missing its header row", line_number=1)
