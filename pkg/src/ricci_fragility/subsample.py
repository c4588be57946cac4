"""Extremal-curvature sub-sampling: search for an m-node induced subgraph
whose average curvature is minimal (default) or maximal, and run the
rolling indicator on the chosen subsets.

The discrete "descent" is a steepest single-swap local search: starting
from a random connected m-subset grown from a random seed vertex, every
swap of one inside node for one outside node that keeps the induced
subgraph connected is scored, and the best strict improvement is taken
until none exists. Restarts draw fresh starting subsets; all randomness
is derived from the config seed, so results are reproducible.

In the rolling pipeline the host graph of each window is the complete
correlation-distance graph, so the induced subgraph on the chosen nodes
is itself complete: the high-value-link rule (add edges with rho >= xi)
cannot add anything new, and the reported value is exactly the search
objective at the optimum. There is deliberately no tree-extraction step
here — this pipeline is the alternative to the spanning-tree skeleton.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .errors import ConfigError, DataError, GraphError
from .graphs import MarketGraph, build_complete_graph, induced_subgraph
from .indicator import (
    WindowConfig,
    IndicatorSeries,
    correlation_matrix,
    distance_from_correlation,
)
from .ingestion import PriceMatrix
from .transport import (
    AVERAGING_MODES,
    WEIGHTINGS,
    CurvatureReport,
    average_curvature,
)

OBJECTIVES = ("minimize", "maximize")

#: Improvements smaller than this are treated as ties and do not move the
#: search; keeps swap sequences deterministic under float jitter.
IMPROVE_TOL = 1e-12

#: Restart index stride for per-restart RNG seeds (a prime, so distinct
#: restarts never collide for distinct base seeds in a suite).
RESTART_STRIDE = 7919


@dataclass(frozen=True)
class SubsampleConfig:
    """Search parameters for extremal subgraph selection.

    ``restarts`` counts additional independent starts beyond the first,
    so ``restarts=0`` runs the local search exactly once.
    """

    m: int
    objective: str = "minimize"
    seed: int = 0
    max_iters: int = 100
    restarts: int = 20

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise ConfigError(f"m must be an integer >= 2, got {self.m!r}")
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if not isinstance(self.max_iters, int) or self.max_iters < 1:
            raise ConfigError(f"max_iters must be a positive integer, got {self.max_iters!r}")
        if not isinstance(self.restarts, int) or self.restarts < 0:
            raise ConfigError(f"restarts must be a nonnegative integer, got {self.restarts!r}")

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "objective": self.objective,
            "seed": self.seed,
            "max_iters": self.max_iters,
            "restarts": self.restarts,
        }


def _is_better(candidate: float, incumbent: float, objective: str) -> bool:
    if objective == "minimize":
        return candidate < incumbent - IMPROVE_TOL
    return candidate > incumbent + IMPROVE_TOL


def _evaluate(graph: MarketGraph, subset: tuple, mode: str, weighting: str):
    """Average curvature of the induced subgraph, or None if the subset
    does not induce a usable connected graph."""
    sub = induced_subgraph(graph, subset)
    if not sub.is_connected():
        return None
    return average_curvature(sub, mode=mode, weighting=weighting)


def _grow_connected_subset(graph: MarketGraph, m: int, rng: random.Random) -> tuple:
    """Random connected m-subset grown from a random start vertex.

    Starts are tried in a shuffled order; growth from a start can only
    stall if its component is smaller than m, so the loop fails only
    when no component has m nodes.
    """
    starts = list(graph.nodes)
    rng.shuffle(starts)
    for start in starts:
        chosen = [start]
        member = {start}
        while len(chosen) < m:
            frontier = sorted(
                {v for u in chosen for v in graph.neighbors(u) if v not in member},
                key=graph.index.__getitem__,
            )
            if not frontier:
                break
            nxt = frontier[rng.randrange(len(frontier))]
            chosen.append(nxt)
            member.add(nxt)
        if len(chosen) == m:
            return tuple(sorted(chosen, key=graph.index.__getitem__))
    raise GraphError(f"no connected subset of {m} nodes exists")


def _local_search(graph: MarketGraph, subset: tuple, config: SubsampleConfig,
                  mode: str, weighting: str):
    """Steepest single-swap descent from ``subset`` to a local optimum."""
    report = _evaluate(graph, subset, mode, weighting)
    if report is None:
        raise GraphError("initial subset does not induce a connected subgraph")
    value = report.average
    outside = [v for v in graph.nodes if v not in set(subset)]

    for _ in range(config.max_iters):
        best_swap = None
        best_value = value
        best_report = None
        # Deterministic scan order: (inside position, outside position).
        for u in subset:
            for v in outside:
                candidate = tuple(sorted(
                    (set(subset) - {u}) | {v}, key=graph.index.__getitem__))
                cand_report = _evaluate(graph, candidate, mode, weighting)
                if cand_report is None:
                    continue
                if _is_better(cand_report.average, best_value, config.objective):
                    best_swap = (u, v, candidate)
                    best_value = cand_report.average
                    best_report = cand_report
        if best_swap is None:
            break
        u, v, subset = best_swap
        outside = [w for w in graph.nodes if w not in set(subset)]
        value = best_value
        report = best_report
    return subset, report


def extremal_subgraph(graph: MarketGraph, config: SubsampleConfig,
                      mode: str = "edges", weighting: str = "edge_weight"):
    """Best m-subset found over all restarts.

    Returns ``(nodes, report)`` where ``nodes`` is the chosen subset in
    the host graph's node order and ``report`` is the curvature report
    of its induced subgraph.
    """
    if mode not in AVERAGING_MODES:
        raise ConfigError(f"mode must be one of {AVERAGING_MODES}, got {mode!r}")
    if weighting not in WEIGHTINGS:
        raise ConfigError(f"unknown weighting {weighting!r}")
    if config.m > graph.n:
        raise ConfigError(f"m={config.m} exceeds graph size n={graph.n}")

    if config.m == graph.n:
        report = _evaluate(graph, graph.nodes, mode, weighting)
        if report is None:
            raise GraphError("graph is not connected")
        return graph.nodes, report

    best_subset = None
    best_report = None
    for r in range(config.restarts + 1):
        rng = random.Random(config.seed + RESTART_STRIDE * r)
        start = _grow_connected_subset(graph, config.m, rng)
        subset, report = _local_search(graph, start, config, mode, weighting)
        if best_report is None or _is_better(report.average, best_report.average,
                                             config.objective):
            best_subset, best_report = subset, report
    return best_subset, best_report


def exhaustive_extremum(graph: MarketGraph, m: int, objective: str = "minimize",
                        mode: str = "edges", weighting: str = "edge_weight"):
    """Global optimum by enumerating every connected m-subset.

    Exponential in n; intended as the ground-truth oracle for small
    graphs when validating the local search.
    """
    if objective not in OBJECTIVES:
        raise ConfigError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    if m < 2 or m > graph.n:
        raise ConfigError(f"m={m} out of range for n={graph.n}")
    best_subset = None
    best_value = None
    for combo in itertools.combinations(graph.nodes, m):
        report = _evaluate(graph, combo, mode, weighting)
        if report is None:
            continue
        if best_value is None or _is_better(report.average, best_value, objective):
            best_subset, best_value = combo, report.average
    if best_subset is None:
        raise GraphError(f"no connected subset of {m} nodes exists")
    return best_subset, best_value


def subsample_indicator_series(prices: PriceMatrix, window_config: WindowConfig,
                               sub_config: SubsampleConfig):
    """Rolling indicator on per-window extremal subsets.

    Each window builds the complete correlation-distance graph, selects
    the extremal m-subset, and reports the average curvature of its
    induced (complete) subgraph. Returns ``(series, subsets)`` with one
    node tuple per window; windows skipped for data reasons carry an
    empty tuple and a NaN value with a note.
    """
    T = window_config.T
    if prices.values.shape[0] < T + 1:
        raise ConfigError(
            f"need at least T+1={T + 1} rows of prices, got {prices.values.shape[0]}")
    if sub_config.m > len(prices.tickers):
        raise ConfigError(
            f"m={sub_config.m} exceeds the number of assets {len(prices.tickers)}")

    dates = []
    values = []
    notes = []
    subsets = []
    n_windows = prices.values.shape[0] - T + 1
    for k in range(n_windows):
        dates.append(prices.dates[k + T - 1])
        try:
            window = prices.window(k, k + T)
            rho, _flagged = correlation_matrix(window, window_config.input_mode)
            dist = distance_from_correlation(rho, window_config.transform)
            complete = build_complete_graph(dist, rho, nodes=window.tickers)
            subset, report = extremal_subgraph(
                complete, sub_config,
                mode=window_config.averaging_mode,
                weighting=window_config.weighting)
        except DataError as exc:
            values.append(math.nan)
            notes.append(str(exc))
            subsets.append(())
            continue
        values.append(report.average)
        notes.append("")
        subsets.append(subset)

    series = IndicatorSeries(dates=tuple(dates), values=tuple(values),
                             config=window_config, notes=tuple(notes))
    return series, tuple(subsets)
