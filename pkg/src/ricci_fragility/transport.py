"""Neighbor measures, exact Wasserstein-1 on the hop metric, and
Ollivier-Ricci curvature.

The W1 solver is exact, not approximate. It peels off structure first —
mass shared between identical atoms never moves under a metric cost, a
residual problem whose distances take one value has a closed form, one
with two values reduces to a maximum flow on the cheap cells — and only
the general case (three or more distinct residual distances) falls back
to a linear program. Every path returns the exact optimum up to float
rounding of sums, which keeps closed-form comparisons tight at 1e-12.

A deliberately naive exhaustive oracle (`wasserstein1_oracle`) solves
small rational instances by integer dynamic programming and shares no
code with the solver, so the two can check each other.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import block_diag, csr_matrix

from .errors import (
    ConfigError,
    DataError,
    DisconnectedGraphError,
    GraphError,
    InfiniteDistanceError,
    OracleBudgetError,
)
from .graphs import HopDistanceMatrix, MarketGraph, hop_distances

#: Probability masses must sum to one within this tolerance.
MASS_TOL = 1e-12

#: Transport plans must reproduce their marginals within this tolerance.
MARGINAL_TOL = 1e-9

WEIGHTINGS = ("edge_weight", "uniform")

AVERAGING_MODES = ("edges", "pairs")


@dataclass(frozen=True)
class NodeMeasure:
    """Probability measure on a graph's node set.

    ``support`` lists atoms in node order and ``masses`` their weights;
    every mass is strictly positive and the total is one within
    ``MASS_TOL``.
    """

    support: tuple
    masses: np.ndarray

    def __post_init__(self):
        support = tuple(self.support)
        masses = np.asarray(self.masses, dtype=float).copy()
        if masses.ndim != 1 or len(support) != masses.shape[0]:
            raise DataError("support and masses have mismatched lengths")
        if len(set(support)) != len(support):
            raise DataError("support atoms must be distinct")
        if masses.size == 0:
            raise DataError("measure must have at least one atom")
        if np.any(masses <= 0.0) or not np.all(np.isfinite(masses)):
            raise DataError("every mass must be finite and strictly positive")
        if abs(float(masses.sum()) - 1.0) > MASS_TOL:
            raise DataError(f"masses sum to {masses.sum()!r}, not 1")
        masses.flags.writeable = False
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "masses", masses)

    def mass_of(self, node) -> float:
        for v, m in zip(self.support, self.masses):
            if v == node:
                return float(m)
        return 0.0


@dataclass(frozen=True)
class TransportPlan:
    """Optimal coupling between two measures.

    ``plan[i, j]`` is the mass shipped from atom ``i`` of the source
    measure to atom ``j`` of the target measure; ``cost`` is the total
    transport cost (the W1 value when the plan is optimal).
    """

    plan: np.ndarray
    cost: float

    def __post_init__(self):
        plan = np.asarray(self.plan, dtype=float).copy()
        if plan.ndim != 2:
            raise DataError("plan must be a 2-d array")
        if np.any(plan < -1e-15):
            raise DataError("plan entries must be nonnegative")
        plan[plan < 0.0] = 0.0
        plan.flags.writeable = False
        object.__setattr__(self, "plan", plan)
        object.__setattr__(self, "cost", float(self.cost))

    def row_marginal(self) -> np.ndarray:
        return self.plan.sum(axis=1)

    def col_marginal(self) -> np.ndarray:
        return self.plan.sum(axis=0)


@dataclass(frozen=True)
class CurvatureReport:
    """Per-pair curvatures plus their arithmetic mean.

    ``mode`` records whether pairs range over edges or over all node
    pairs; ``per_pair`` maps canonical pairs to curvature values in
    canonical order.
    """

    per_pair: dict
    average: float
    mode: str


def node_measure(graph: MarketGraph, node, weighting: str = "edge_weight") -> NodeMeasure:
    """Measure spread over the neighbours of ``node``.

    ``edge_weight`` assigns each neighbour mass proportional to the
    connecting edge's weight; ``uniform`` splits mass equally. When all
    incident weights are zero the edge_weight rule degenerates, so it
    falls back to uniform. Zero-weight neighbours of an otherwise
    positively weighted node carry no mass and are dropped from the
    support.
    """
    if weighting not in WEIGHTINGS:
        raise ConfigError(f"unknown weighting {weighting!r}")
    nbrs = graph.neighbors(node)
    if not nbrs:
        raise DataError(f"node {node!r} is isolated; its measure is undefined")
    if weighting == "uniform":
        masses = np.full(len(nbrs), 1.0 / len(nbrs))
        return NodeMeasure(support=nbrs, masses=masses)
    w = np.array([graph.weights[graph.edge_key(node, v)] for v in nbrs], dtype=float)
    total = float(w.sum())
    if total <= 0.0:
        masses = np.full(len(nbrs), 1.0 / len(nbrs))
        return NodeMeasure(support=nbrs, masses=masses)
    keep = w > 0.0
    support = tuple(v for v, k in zip(nbrs, keep) if k)
    masses = w[keep] / total
    return NodeMeasure(support=support, masses=masses)


# ---------------------------------------------------------------------------
# Exact W1 engine
# ---------------------------------------------------------------------------


def _greedy_fill(row_caps: np.ndarray, col_caps: np.ndarray, allowed: np.ndarray) -> np.ndarray:
    """Ship as much as possible on ``allowed`` cells, sources in order.

    Water-filling per row: each source pours into allowed columns in
    index order while they still have capacity. Returns the shipment
    matrix; callers check whether everything was placed.
    """
    m, k = allowed.shape
    ship = np.zeros((m, k))
    col_rem = col_caps.copy()
    for i in range(m):
        cap = row_caps[i]
        if cap <= 0.0:
            continue
        cols = np.nonzero(allowed[i] & (col_rem > 0.0))[0]
        if cols.size == 0:
            continue
        avail = col_rem[cols]
        ahead = np.concatenate(([0.0], np.cumsum(avail)[:-1]))
        give = np.minimum(avail, np.maximum(cap - ahead, 0.0))
        ship[i, cols] = give
        col_rem[cols] -= give
    return ship


def _max_flow_float(row_caps: np.ndarray, col_caps: np.ndarray, allowed: np.ndarray) -> np.ndarray:
    """Maximum bipartite flow with float capacities (Edmonds-Karp).

    Exact in float arithmetic: each augmentation saturates its bottleneck
    arc by subtracting that arc's own residual, so no epsilon thresholds
    accumulate. Sized for supports of at most a few hundred atoms.
    """
    m, k = allowed.shape
    n = m + k + 2
    s, t = 0, n - 1
    cap = np.zeros((n, n))
    cap[s, 1 : m + 1] = row_caps
    cap[m + 1 : m + 1 + k, t] = col_caps
    big = float(row_caps.sum()) + 1.0
    rows, cols = np.nonzero(allowed)
    cap[rows + 1, cols + m + 1] = big

    while True:
        parent = np.full(n, -1, dtype=np.intp)
        parent[s] = s
        queue = deque([s])
        while queue and parent[t] < 0:
            u = queue.popleft()
            for v in np.nonzero(cap[u] > 0.0)[0]:
                if parent[v] < 0:
                    parent[v] = u
                    queue.append(v)
        if parent[t] < 0:
            break
        path = [t]
        while path[-1] != s:
            path.append(parent[path[-1]])
        path.reverse()
        bottleneck = min(cap[u, v] for u, v in zip(path, path[1:]))
        for u, v in zip(path, path[1:]):
            cap[u, v] -= bottleneck
            cap[v, u] += bottleneck

    # Flow on an allowed arc equals the reverse residual it accumulated.
    flow = np.zeros((m, k))
    flow[rows, cols] = cap[cols + m + 1, rows + 1]
    return flow


@lru_cache(maxsize=512)
def _marginal_matrix(m: int, k: int) -> csr_matrix:
    """Equality-constraint matrix of the (m, k) transportation LP.

    Row i sums the i-th source's shipments; row m + j sums the j-th
    sink's. The sparsity pattern depends only on the shape, so it is
    cached across calls.
    """
    top_indices = np.arange(m * k)
    top_indptr = np.arange(0, m * k + 1, k)
    bot_indices = (np.arange(k)[:, None] + k * np.arange(m)[None, :]).ravel()
    bot_indptr = m * k + np.arange(0, m * k + 1, m)
    indices = np.concatenate([top_indices, bot_indices])
    indptr = np.concatenate([top_indptr, bot_indptr[1:]])
    data = np.ones(2 * m * k)
    return csr_matrix((data, indices, indptr), shape=(m + k, m * k))


def _lp_transport(row_caps: np.ndarray, col_caps: np.ndarray, dist: np.ndarray) -> np.ndarray:
    """Exact optimal transport via the HiGHS simplex linear program."""
    m, k = dist.shape
    total_r = float(row_caps.sum())
    total_c = float(col_caps.sum())
    # Equality constraints need matching totals; the inputs agree to
    # ~1e-12, so rescale the columns onto the row total.
    col = col_caps * (total_r / total_c)
    b_eq = np.concatenate([row_caps, col])
    res = linprog(dist.ravel(), A_eq=_marginal_matrix(m, k), b_eq=b_eq,
                  bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(f"transport LP failed: {res.message}")
    return res.x.reshape(m, k)


def _group_rows(pattern: np.ndarray, caps: np.ndarray):
    """Merge rows with identical patterns; they are interchangeable.

    Sources (or sinks) whose cost rows coincide can be pooled into one
    super-node with the summed capacity without changing the optimum.
    Returns representative row indices and pooled capacities.
    """
    _, first, inverse = np.unique(pattern, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    pooled = np.bincount(inverse, weights=caps, minlength=first.size)
    return first, pooled


def _group_bool_rows(pattern: np.ndarray, caps: np.ndarray):
    """`_group_rows` for boolean patterns, deduplicating on packed bytes."""
    packed = np.packbits(pattern, axis=1)
    view = np.ascontiguousarray(packed).view(
        np.dtype((np.void, packed.shape[1]))).ravel()
    _, first, inverse = np.unique(view, return_index=True, return_inverse=True)
    pooled = np.bincount(inverse, weights=caps, minlength=first.size)
    return first, pooled


def _sorted_intersect(pos_a: np.ndarray, pos_b: np.ndarray):
    """Index pairs of equal entries in two sorted arrays of unique ints."""
    if pos_a.size == 0 or pos_b.size == 0:
        return None
    loc = np.searchsorted(pos_a, pos_b)
    clipped = np.minimum(loc, pos_a.size - 1)
    valid = pos_a[clipped] == pos_b
    if not np.any(valid):
        return None
    return loc[valid], np.nonzero(valid)[0]


@dataclass(frozen=True)
class _PendingCost:
    """Placeholder for a transport cost deferred into an `_LpBatch`."""

    index: int


class _LpBatch:
    """Collects small transportation LPs and solves them in one call.

    Windows on dense graphs generate hundreds of residual problems with
    three or more distinct distances; solving each in its own `linprog`
    call pays the solver's setup cost every time. The blocks are
    independent, so stacking them into one block-diagonal program gives
    identical optima for a single setup.
    """

    def __init__(self):
        self._blocks = []

    def add(self, row_caps: np.ndarray, col_caps: np.ndarray,
            dist: np.ndarray) -> _PendingCost:
        self._blocks.append((row_caps, col_caps, dist))
        return _PendingCost(len(self._blocks) - 1)

    def solve(self) -> np.ndarray:
        if not self._blocks:
            return np.empty(0)
        mats, b_parts, c_parts, offsets = [], [], [], [0]
        for rc, cc, d in self._blocks:
            mats.append(_marginal_matrix(d.shape[0], d.shape[1]))
            b_parts.append(rc)
            b_parts.append(cc * (float(rc.sum()) / float(cc.sum())))
            c_parts.append(d.ravel())
            offsets.append(offsets[-1] + d.size)
        c = np.concatenate(c_parts)
        res = linprog(c, A_eq=block_diag(mats, format="csr"),
                      b_eq=np.concatenate(b_parts), bounds=(0, None), method="highs")
        if res.status != 0:
            raise RuntimeError(f"batched transport LP failed: {res.message}")
        return np.array([float(np.dot(c[s:e], res.x[s:e]))
                         for s, e in zip(offsets, offsets[1:])])


def _residual_cost(row_caps: np.ndarray, col_caps: np.ndarray, sub: np.ndarray,
                   vmin: float, vmax: float, moved: float,
                   batch: _LpBatch | None):
    """W1 of the residual problem, cost only, on pooled super-nodes.

    Residual atoms with identical cost rows (columns) are merged;
    pooling is exact because such atoms are interchangeable in any
    coupling. On dense market graphs this shrinks a ~90 x 90 residual
    to a handful of super-nodes, so the flow and LP fallbacks stay
    cheap. With two distinct distances a full-size greedy pass runs
    first: if it ships everything at the cheap distance that is a
    matching lower bound, hence optimal.
    """
    if not np.any((sub > vmin) & (sub < vmax)):
        cheap = sub == vmin
        ship = _greedy_fill(row_caps, col_caps, cheap)
        if moved - float(ship.sum()) <= MASS_TOL:
            return vmin * moved
        rows, rcaps = _group_bool_rows(cheap, row_caps)
        cols, ccaps = _group_bool_rows(cheap.T, col_caps)
        flow = _max_flow_float(rcaps, ccaps, cheap[np.ix_(rows, cols)])
        cheap_mass = float(flow.sum())
        return vmin * cheap_mass + vmax * (moved - cheap_mass)

    rows, rcaps = _group_rows(sub, row_caps)
    cols, ccaps = _group_rows(sub.T, col_caps)
    pooled = sub[np.ix_(rows, cols)]
    if batch is not None:
        return batch.add(rcaps, ccaps, pooled)
    ship = _lp_transport(rcaps, ccaps, pooled)
    return float((ship * pooled).sum())


def _transport_core(a: np.ndarray, b: np.ndarray, dist: np.ndarray,
                    shared: tuple[np.ndarray, np.ndarray] | None,
                    want_plan: bool = True, batch: _LpBatch | None = None):
    """Exact W1 between mass vectors ``a`` and ``b`` under metric ``dist``.

    ``shared`` optionally gives index arrays ``(ia, jb)`` of atoms that
    are the same node in both supports; mass shared that way is fixed in
    place first, which is optimal for any metric cost. Returns
    ``(cost, plan)`` on the full supports; with ``want_plan=False`` the
    plan is ``None``, the residual is solved on pooled super-nodes, and
    the cost may be a ``_PendingCost`` when a ``batch`` is supplied.
    """
    if not np.all(np.isfinite(dist)):
        raise InfiniteDistanceError("supports span disconnected components")

    m, k = dist.shape
    plan = np.zeros((m, k)) if want_plan else None
    ra = a.astype(float).copy()
    rb = b.astype(float).copy()
    if shared is not None:
        ia, jb = shared
        fixed = np.minimum(ra[ia], rb[jb])
        if want_plan:
            plan[ia, jb] = fixed
        ra[ia] -= fixed
        rb[jb] -= fixed

    src = np.nonzero(ra > 0.0)[0]
    snk = np.nonzero(rb > 0.0)[0]
    if src.size == 0 or snk.size == 0:
        return 0.0, plan

    sub = dist[np.ix_(src, snk)]
    row_caps = ra[src]
    col_caps = rb[snk]
    moved = min(float(row_caps.sum()), float(col_caps.sum()))
    vmin = float(sub.min())
    vmax = float(sub.max())

    if vmin == vmax:
        if want_plan:
            ship = _greedy_fill(row_caps, col_caps, np.ones_like(sub, dtype=bool))
            plan[np.ix_(src, snk)] += ship
        return vmin * moved, plan

    if not want_plan:
        return _residual_cost(row_caps, col_caps, sub, vmin, vmax, moved, batch), None

    if not np.any((sub > vmin) & (sub < vmax)):
        cheap = sub == vmin
        ship = _greedy_fill(row_caps, col_caps, cheap)
        leftover = moved - float(ship.sum())
        if leftover <= MASS_TOL:
            plan[np.ix_(src, snk)] += ship
            return vmin * moved, plan
        flow = _max_flow_float(row_caps, col_caps, cheap)
        cheap_mass = float(flow.sum())
        rest = _greedy_fill(row_caps - flow.sum(axis=1),
                            col_caps - flow.sum(axis=0),
                            ~cheap)
        plan[np.ix_(src, snk)] += flow + rest
        return vmin * cheap_mass + vmax * (moved - cheap_mass), plan

    ship = _lp_transport(row_caps, col_caps, sub)
    plan[np.ix_(src, snk)] += ship
    return float((ship * sub).sum()), plan


def _support_positions(measure: NodeMeasure, hop: HopDistanceMatrix) -> np.ndarray:
    idx = hop.index
    try:
        return np.fromiter((idx[v] for v in measure.support), dtype=np.intp)
    except KeyError as exc:
        raise GraphError(f"support atom {exc.args[0]!r} missing from hop matrix") from exc


def _w1_cost_positions(pos_a: np.ndarray, mass_a: np.ndarray,
                       pos_b: np.ndarray, mass_b: np.ndarray,
                       matrix: np.ndarray, want_plan: bool = False,
                       batch: _LpBatch | None = None):
    """W1 between measures given as (positions, masses) pairs.

    Positions from `node_measure` follow node order and are sorted; the
    general path re-sorts defensively for measures built by hand.
    """
    dist = matrix[np.ix_(pos_a, pos_b)]
    if np.all(np.diff(pos_a) > 0) and np.all(np.diff(pos_b) > 0):
        shared = _sorted_intersect(pos_a, pos_b)
    else:
        common, ia, jb = np.intersect1d(pos_a, pos_b, return_indices=True)
        shared = (ia, jb) if common.size else None
    return _transport_core(mass_a, mass_b, dist, shared,
                           want_plan=want_plan, batch=batch)


def wasserstein1(mu: NodeMeasure, nu: NodeMeasure, hop: HopDistanceMatrix) -> TransportPlan:
    """Exact W1 distance between ``mu`` and ``nu`` under hop distances.

    Returns the optimal coupling; its marginals reproduce the input
    masses within ``MARGINAL_TOL``. Raises ``InfiniteDistanceError``
    when the supports straddle disconnected components.
    """
    pos_a = _support_positions(mu, hop)
    pos_b = _support_positions(nu, hop)
    cost, plan = _w1_cost_positions(pos_a, mu.masses, pos_b, nu.masses,
                                    hop.matrix, want_plan=True)
    row_err = float(np.max(np.abs(plan.sum(axis=1) - mu.masses)))
    col_err = float(np.max(np.abs(plan.sum(axis=0) - nu.masses)))
    if max(row_err, col_err) > MARGINAL_TOL:
        raise RuntimeError(f"transport plan violates marginals (err={max(row_err, col_err)})")
    return TransportPlan(plan=plan, cost=cost)


def wasserstein1_cost(mu: NodeMeasure, nu: NodeMeasure, hop: HopDistanceMatrix) -> float:
    """W1 value only, skipping plan materialisation (hot-loop variant)."""
    pos_a = _support_positions(mu, hop)
    pos_b = _support_positions(nu, hop)
    cost, _ = _w1_cost_positions(pos_a, mu.masses, pos_b, nu.masses, hop.matrix)
    return cost


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------


def wasserstein1_oracle(mu: NodeMeasure, nu: NodeMeasure, hop: HopDistanceMatrix,
                        max_denominator: int = 12, max_support: int = 8) -> float:
    """Brute-force W1 for small rational instances.

    Masses must be integer multiples of ``1/q`` for a common ``q`` up to
    ``max_denominator``, and the two supports together may hold at most
    ``max_support`` atoms (both limits adjustable upward by the caller).
    Each of the ``q`` unit masses of ``mu`` is assigned to a sink by
    exhaustive search with memoisation on the remaining sink capacities.
    Shares no code with the solver on purpose.
    """
    if len(mu.support) + len(nu.support) > max_support:
        raise OracleBudgetError(
            f"combined support {len(mu.support) + len(nu.support)} exceeds budget {max_support}")

    found = None
    for q in range(1, max_denominator + 1):
        src = mu.masses * q
        snk = nu.masses * q
        src_units = np.rint(src)
        snk_units = np.rint(snk)
        if (np.max(np.abs(src - src_units)) < 1e-6 and np.max(np.abs(snk - snk_units)) < 1e-6
                and np.all(src_units >= 1) and np.all(snk_units >= 1)
                and int(src_units.sum()) == q and int(snk_units.sum()) == q):
            found = (q, [int(u) for u in src_units], [int(u) for u in snk_units])
            break
    if found is None:
        raise OracleBudgetError(
            f"masses are not multiples of 1/q for any q <= {max_denominator}")
    q, src_units, snk_units = found

    idx = hop.index
    dist = np.empty((len(mu.support), len(nu.support)), dtype=np.int64)
    for i, u in enumerate(mu.support):
        for j, v in enumerate(nu.support):
            d = hop.matrix[idx[u], idx[v]]
            if not np.isfinite(d):
                raise InfiniteDistanceError("supports span disconnected components")
            dist[i, j] = int(round(float(d)))

    # Expand source units into a fixed processing order; the position in
    # that order is implied by how many sink units remain, so memoising
    # on the remaining-capacity tuple alone is sound.
    unit_atoms = []
    for i, u in enumerate(src_units):
        unit_atoms.extend([i] * u)

    memo = {}

    def best(pos: int, remaining: tuple) -> int:
        if pos == q:
            return 0
        hit = memo.get(remaining)
        if hit is not None:
            return hit
        i = unit_atoms[pos]
        out = None
        for j, r in enumerate(remaining):
            if r > 0:
                nxt = remaining[:j] + (r - 1,) + remaining[j + 1:]
                cand = int(dist[i, j]) + best(pos + 1, nxt)
                if out is None or cand < out:
                    out = cand
        memo[remaining] = out
        return out

    total = best(0, tuple(snk_units))
    return total / q


# ---------------------------------------------------------------------------
# Curvature
# ---------------------------------------------------------------------------


def edge_curvature(graph: MarketGraph, hop: HopDistanceMatrix, a, b,
                   weighting: str = "edge_weight") -> float:
    """Ollivier-Ricci curvature kappa(a, b) = 1 - W1(mu_a, mu_b) / d(a, b)."""
    if a == b:
        raise ConfigError("curvature needs two distinct nodes")
    d = hop.dist(a, b)
    if not np.isfinite(d):
        raise InfiniteDistanceError(f"nodes {a!r}, {b!r} are disconnected")
    mu_a = node_measure(graph, a, weighting)
    mu_b = node_measure(graph, b, weighting)
    return 1.0 - wasserstein1_cost(mu_a, mu_b, hop) / d


def _measures_by_position(graph: MarketGraph, hop: HopDistanceMatrix, weighting: str) -> dict:
    out = {}
    for v in graph.nodes:
        mu = node_measure(graph, v, weighting)
        out[v] = (_support_positions(mu, hop), mu.masses)
    return out


def average_curvature(graph: MarketGraph, mode: str = "edges",
                      weighting: str = "edge_weight",
                      hop: HopDistanceMatrix | None = None) -> CurvatureReport:
    """Mean curvature over edges or over all node pairs.

    ``edges`` averages kappa over the edge set (requires at least one
    edge); ``pairs`` averages over all unordered node pairs and demands
    a connected graph. Pass a precomputed ``hop`` matrix to amortise BFS
    across calls on the same graph.
    """
    if mode not in AVERAGING_MODES:
        raise ConfigError(f"unknown averaging mode {mode!r}")
    if weighting not in WEIGHTINGS:
        raise ConfigError(f"unknown weighting {weighting!r}")
    if hop is None:
        hop = hop_distances(graph)
    elif hop.nodes != graph.nodes:
        raise GraphError("hop matrix does not match the graph's node set")

    if mode == "edges":
        if not graph.edges:
            raise DataError("edges-mode average needs at least one edge")
        pairs = graph.edges
    else:
        if not hop.connected:
            raise DisconnectedGraphError("pairs-mode average needs a connected graph")
        nodes = graph.nodes
        pairs = tuple((nodes[i], nodes[j])
                      for i in range(len(nodes)) for j in range(i + 1, len(nodes)))

    measures = _measures_by_position(graph, hop, weighting)
    idx = hop.index
    batch = _LpBatch()
    records = []
    for a, b in pairs:
        d = float(hop.matrix[idx[a], idx[b]])
        pos_a, mass_a = measures[a]
        pos_b, mass_b = measures[b]
        cost, _ = _w1_cost_positions(pos_a, mass_a, pos_b, mass_b, hop.matrix,
                                     batch=batch)
        records.append((a, b, d, cost))
    solved = batch.solve()

    per_pair = {}
    values = np.empty(len(records))
    for t, (a, b, d, cost) in enumerate(records):
        if isinstance(cost, _PendingCost):
            cost = float(solved[cost.index])
        kappa = 1.0 - cost / d
        per_pair[(a, b)] = kappa
        values[t] = kappa
    return CurvatureReport(per_pair=per_pair, average=float(values.mean()), mode=mode)
