"""Undirected weighted market graphs.

Construction from distance/correlation matrices, Prim minimum spanning
trees with deterministic tie-breaking, correlation-threshold edge
augmentation, unweighted hop-distance matrices, and induced subgraphs.

Edge weights are *distances* (larger = weaker relationship); raw
correlations ride along separately because thresholding reads
correlations while tree construction and transport read distances.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import ConfigError, DisconnectedGraphError, GraphError

#: Marker for node pairs with no connecting path in a hop-distance matrix.
UNREACHABLE = np.inf

#: Slack allowed when validating allegedly symmetric float matrices.
SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class MarketGraph:
    """Immutable undirected weighted graph over an ordered node set.

    Parameters
    ----------
    nodes : tuple
        Ordered node identifiers (tickers or integers). Node order is the
        canonical order used for edge keys, iteration, and tie-breaking.
    edges : tuple
        Edge keys ``(a, b)`` with ``a`` preceding ``b`` in node order.
        Non-canonical input is normalised; duplicates are rejected.
    weights : dict
        Map from edge key to nonnegative finite distance.
    correlations : dict or None
        Optional map from edge key to correlation in ``[-1, 1]``. When
        present it must cover every edge. Values within ``1e-9`` of the
        interval are clipped onto it.
    """

    nodes: tuple
    edges: tuple
    weights: dict
    correlations: dict | None = None

    def __post_init__(self):
        nodes = tuple(self.nodes)
        if len(nodes) < 2:
            raise GraphError("graph needs at least two nodes")
        index = {v: i for i, v in enumerate(nodes)}
        if len(index) != len(nodes):
            raise GraphError("duplicate node identifiers")

        canonical = []
        weights = {}
        correlations = {} if self.correlations is not None else None
        seen = set()
        for edge in self.edges:
            a, b = edge
            if a == b:
                raise GraphError(f"self-loop on node {a!r}")
            if a not in index or b not in index:
                raise GraphError(f"edge {edge!r} references unknown node")
            key = (a, b) if index[a] < index[b] else (b, a)
            if key in seen:
                raise GraphError(f"duplicate edge {key!r}")
            seen.add(key)
            canonical.append(key)

            w = self._lookup(self.weights, edge, key)
            if w is None:
                raise GraphError(f"missing weight for edge {key!r}")
            w = float(w)
            if not np.isfinite(w) or w < 0.0:
                raise GraphError(f"weight for edge {key!r} must be finite and >= 0")
            weights[key] = w

            if correlations is not None:
                rho = self._lookup(self.correlations, edge, key)
                if rho is None:
                    raise GraphError(f"missing correlation for edge {key!r}")
                rho = float(rho)
                if abs(rho) > 1.0 + SYMMETRY_TOL:
                    raise GraphError(f"correlation {rho} for edge {key!r} outside [-1, 1]")
                correlations[key] = min(1.0, max(-1.0, rho))

        canonical.sort(key=lambda e: (index[e[0]], index[e[1]]))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", tuple(canonical))
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "correlations", correlations)

    @staticmethod
    def _lookup(table, edge, key):
        if edge in table:
            return table[edge]
        return table.get(key)

    @cached_property
    def index(self) -> dict:
        """Node id -> position in ``nodes``."""
        return {v: i for i, v in enumerate(self.nodes)}

    @cached_property
    def adjacency(self) -> dict:
        """Node id -> tuple of neighbours in node order."""
        nbrs = {v: [] for v in self.nodes}
        for a, b in self.edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        idx = self.index
        return {v: tuple(sorted(ns, key=idx.__getitem__)) for v, ns in nbrs.items()}

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_key(self, a, b) -> tuple:
        idx = self.index
        if a not in idx or b not in idx:
            raise GraphError(f"unknown node in pair ({a!r}, {b!r})")
        if a == b:
            raise GraphError(f"pair ({a!r}, {b!r}) is not an edge key")
        return (a, b) if idx[a] < idx[b] else (b, a)

    def has_edge(self, a, b) -> bool:
        return self.edge_key(a, b) in self.weights

    def weight(self, a, b) -> float:
        return self.weights[self.edge_key(a, b)]

    def correlation(self, a, b) -> float:
        if self.correlations is None:
            raise GraphError("graph carries no correlations")
        return self.correlations[self.edge_key(a, b)]

    def neighbors(self, v) -> tuple:
        if v not in self.index:
            raise GraphError(f"unknown node {v!r}")
        return self.adjacency[v]

    def degree(self, v) -> int:
        return len(self.neighbors(v))

    def is_connected(self) -> bool:
        start = self.nodes[0]
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == self.n


@dataclass(frozen=True)
class HopDistanceMatrix:
    """Unweighted shortest-path (hop) distances for a graph's node set.

    ``matrix[i, j]`` is the hop count between ``nodes[i]`` and
    ``nodes[j]``; unreachable pairs hold ``UNREACHABLE`` (``inf``).
    The array is frozen read-only so instances can be shared freely.
    """

    nodes: tuple
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(self.nodes):
            raise GraphError("hop matrix shape does not match node count")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "matrix", m)

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.nodes)}

    def dist(self, a, b) -> float:
        idx = self.index
        return float(self.matrix[idx[a], idx[b]])

    def positions(self, node_ids) -> np.ndarray:
        idx = self.index
        return np.fromiter((idx[v] for v in node_ids), dtype=np.intp)

    @property
    def connected(self) -> bool:
        return bool(np.all(np.isfinite(self.matrix)))


def build_complete_graph(distances, correlations, nodes=None) -> MarketGraph:
    """Build the complete graph K_n with distance weights and correlations.

    Both matrices must be square, symmetric (within ``1e-9``), and of the
    same order ``n >= 2``; distances must be nonnegative with a zero
    diagonal. ``nodes`` optionally labels the vertices (defaults to
    ``0..n-1``).
    """
    d = np.asarray(distances, dtype=float)
    c = np.asarray(correlations, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise GraphError("distance matrix must be square")
    if c.shape != d.shape:
        raise GraphError("correlation matrix shape differs from distance matrix")
    n = d.shape[0]
    if n < 2:
        raise GraphError("need at least two nodes")
    if not np.all(np.isfinite(d)):
        raise GraphError("distance matrix has non-finite entries")
    if np.max(np.abs(d - d.T)) > SYMMETRY_TOL or np.max(np.abs(c - c.T)) > SYMMETRY_TOL:
        raise GraphError("input matrices must be symmetric")
    if np.max(np.abs(np.diag(d))) > 1e-12:
        raise GraphError("distance matrix diagonal must be zero")
    if np.min(d) < 0.0:
        raise GraphError("distances must be nonnegative")

    if nodes is None:
        nodes = tuple(range(n))
    else:
        nodes = tuple(nodes)
        if len(nodes) != n:
            raise GraphError("node labels do not match matrix order")

    edges, weights, corrs = [], {}, {}
    for i in range(n):
        for j in range(i + 1, n):
            key = (nodes[i], nodes[j])
            edges.append(key)
            weights[key] = float(d[i, j])
            corrs[key] = float(c[i, j])
    return MarketGraph(nodes=nodes, edges=tuple(edges), weights=weights, correlations=corrs)


def minimum_spanning_tree(graph: MarketGraph) -> MarketGraph:
    """Prim's minimum spanning tree with deterministic tie-breaking.

    Growth starts from the first node; at each step the frontier edge
    with the smallest ``(weight, i, j)`` triple is taken, where ``i < j``
    are the endpoint positions in node order. Equal-weight inputs
    therefore always produce the same tree.
    """
    idx = graph.index
    in_tree = {graph.nodes[0]}
    chosen = []
    heap = []

    def push_frontier(u):
        iu = idx[u]
        for v in graph.adjacency[u]:
            if v not in in_tree:
                iv = idx[v]
                i, j = (iu, iv) if iu < iv else (iv, iu)
                heapq.heappush(heap, (graph.weights[graph.edge_key(u, v)], i, j))

    push_frontier(graph.nodes[0])
    while heap and len(chosen) < graph.n - 1:
        w, i, j = heapq.heappop(heap)
        a, b = graph.nodes[i], graph.nodes[j]
        if a in in_tree and b in in_tree:
            continue
        new = b if a in in_tree else a
        chosen.append((a, b))
        in_tree.add(new)
        push_frontier(new)

    if len(chosen) != graph.n - 1:
        raise DisconnectedGraphError("graph is disconnected; no spanning tree exists")

    weights = {e: graph.weights[e] for e in chosen}
    corrs = None
    if graph.correlations is not None:
        corrs = {e: graph.correlations[e] for e in chosen}
    return MarketGraph(nodes=graph.nodes, edges=tuple(chosen), weights=weights, correlations=corrs)


def augment_high_value_edges(mst: MarketGraph, base: MarketGraph, xi: float) -> MarketGraph:
    """Union of the tree edges and all base edges with correlation >= xi.

    ``mst`` must span the same node set as ``base`` and use only base
    edges; ``base`` must carry correlations. ``xi`` lies in ``[-1, 1]``.
    Weights and correlations of retained edges come from ``base``.
    """
    xi = float(xi)
    if not -1.0 <= xi <= 1.0:
        raise ConfigError(f"threshold xi={xi} outside [-1, 1]")
    if mst.nodes != base.nodes:
        raise GraphError("tree and base graph disagree on the node set")
    if base.correlations is None:
        raise GraphError("base graph carries no correlations to threshold")
    for e in mst.edges:
        if e not in base.weights:
            raise GraphError(f"tree edge {e!r} is not a base edge")

    kept = set(mst.edges)
    for e, rho in base.correlations.items():
        if rho >= xi:
            kept.add(e)
    idx = base.index
    edges = tuple(sorted(kept, key=lambda e: (idx[e[0]], idx[e[1]])))
    weights = {e: base.weights[e] for e in edges}
    corrs = {e: base.correlations[e] for e in edges}
    return MarketGraph(nodes=base.nodes, edges=edges, weights=weights, correlations=corrs)


def hop_distances(graph: MarketGraph) -> HopDistanceMatrix:
    """All-pairs unweighted shortest-path lengths (BFS metric).

    Unreachable pairs are marked ``UNREACHABLE`` rather than raising, so
    callers decide whether disconnection is an error.
    """
    n = graph.n
    idx = graph.index
    rows, cols = [], []
    for a, b in graph.edges:
        i, j = idx[a], idx[b]
        rows.extend((i, j))
        cols.extend((j, i))
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    m = shortest_path(adj, method="D", directed=False, unweighted=True)
    return HopDistanceMatrix(nodes=graph.nodes, matrix=m)


def induced_subgraph(graph: MarketGraph, node_subset) -> MarketGraph:
    """Subgraph on ``node_subset`` keeping all internal edges.

    Node order is inherited from ``graph``; the subset must contain at
    least two distinct known nodes.
    """
    subset = list(node_subset)
    seen = set()
    for v in subset:
        if v not in graph.index:
            raise GraphError(f"unknown node {v!r} in subset")
        if v in seen:
            raise GraphError(f"duplicate node {v!r} in subset")
        seen.add(v)
    if len(seen) < 2:
        raise ConfigError("subset must contain at least two nodes")

    nodes = tuple(v for v in graph.nodes if v in seen)
    edges = tuple(e for e in graph.edges if e[0] in seen and e[1] in seen)
    weights = {e: graph.weights[e] for e in edges}
    corrs = None
    if graph.correlations is not None:
        corrs = {e: graph.correlations[e] for e in edges}
    return MarketGraph(nodes=nodes, edges=edges, weights=weights, correlations=corrs)
