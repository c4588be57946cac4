"""Rolling curvature indicator: windows -> correlations -> distances ->
filtered graph -> average curvature series.

Correlations are pairwise-complete Pearson: each pair is correlated
over the window rows where both series are present, computed with
masked matrix products so a 132 x 50 window costs a handful of matmuls.
Each window's correlation matrix becomes a distance matrix through a
decreasing transform, the complete distance graph is pruned to its MST
plus all edges above the correlation threshold, and the average
Ollivier-Ricci curvature of that filtered graph is one point of the
series, labelled by the window's last date so nothing looks ahead.

Windows that fail validation (insufficient overlap, disconnection)
yield NaN gaps rather than aborting the series; the reasons are kept on
the series so runs remain auditable.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DataError, InsufficientOverlapError
from .graphs import MarketGraph, augment_high_value_edges, build_complete_graph, \
    hop_distances, minimum_spanning_tree
from .ingestion import PriceMatrix
from .transport import AVERAGING_MODES, WEIGHTINGS, average_curvature

#: Minimum overlapping observations for a pairwise correlation.
MIN_OVERLAP = 3

TRANSFORM_KINDS = ("sqrt_ultrametric", "power", "log1p_scaled")

INPUT_MODES = ("raw_price", "log_return")


@dataclass(frozen=True)
class DistanceTransform:
    """Decreasing map from correlation to distance, zero at rho = 1.

    ``sqrt_ultrametric``: d = sqrt(2 (1 - rho)), the classical choice;
    ``power``: d = (2 (1 - rho))^p for a positive exponent ``p``;
    ``log1p_scaled``: d = log(1 + 2 (1 - rho)).
    """

    kind: str = "sqrt_ultrametric"
    p: float | None = None

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise ConfigError(f"unknown transform {self.kind!r}")
        if self.kind == "power":
            if self.p is None or not (self.p > 0.0) or not np.isfinite(self.p):
                raise ConfigError("power transform needs a positive exponent p")
        elif self.p is not None:
            raise ConfigError(f"transform {self.kind!r} takes no exponent")

    @classmethod
    def parse(cls, text: str) -> "DistanceTransform":
        """Parse CLI syntax: ``sqrt``, ``power:<p>``, or ``log1p``."""
        text = text.strip()
        if text == "sqrt":
            return cls("sqrt_ultrametric")
        if text == "log1p":
            return cls("log1p_scaled")
        if text.startswith("power:"):
            try:
                return cls("power", p=float(text.split(":", 1)[1]))
            except ValueError as exc:
                raise ConfigError(f"bad power exponent in {text!r}") from exc
        raise ConfigError(f"unknown distance transform {text!r}")

    def label(self) -> str:
        if self.kind == "power":
            return f"power:{self.p:g}"
        return {"sqrt_ultrametric": "sqrt", "log1p_scaled": "log1p"}[self.kind]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        spread = 2.0 * (1.0 - rho)
        spread[spread < 0.0] = 0.0  # guards rho = 1 + float dust
        if self.kind == "sqrt_ultrametric":
            d = np.sqrt(spread)
        elif self.kind == "power":
            d = spread ** self.p
        else:
            d = np.log1p(spread)
        np.fill_diagonal(d, 0.0)
        return d


@dataclass(frozen=True)
class WindowConfig:
    """Everything a rolling run needs besides the data itself."""

    T: int = 132
    xi: float = 0.85
    transform: DistanceTransform = field(default_factory=DistanceTransform)
    averaging_mode: str = "edges"
    weighting: str = "edge_weight"
    input_mode: str = "raw_price"

    def __post_init__(self):
        if not isinstance(self.T, int) or self.T < MIN_OVERLAP:
            raise ConfigError(f"window length T={self.T!r} must be an int >= {MIN_OVERLAP}")
        if not -1.0 <= self.xi <= 1.0:
            raise ConfigError(f"threshold xi={self.xi} outside [-1, 1]")
        if self.averaging_mode not in AVERAGING_MODES:
            raise ConfigError(f"unknown averaging mode {self.averaging_mode!r}")
        if self.weighting not in WEIGHTINGS:
            raise ConfigError(f"unknown weighting {self.weighting!r}")
        if self.input_mode not in INPUT_MODES:
            raise ConfigError(f"unknown input mode {self.input_mode!r}")

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "xi": self.xi,
            "distance": self.transform.label(),
            "averaging_mode": self.averaging_mode,
            "weighting": self.weighting,
            "input_mode": self.input_mode,
        }


@dataclass(frozen=True)
class IndicatorSeries:
    """Dated indicator values; NaN marks windows that failed validation.

    ``notes`` records one human-readable reason per gap. Values never
    exceed one (curvature is bounded above by one).
    """

    dates: tuple
    values: tuple
    config: WindowConfig
    notes: tuple = ()

    def __post_init__(self):
        dates = tuple(self.dates)
        values = tuple(float(v) for v in self.values)
        if len(dates) != len(values):
            raise DataError("dates and values have different lengths")
        if any(dates[i] >= dates[i + 1] for i in range(len(dates) - 1)):
            raise DataError("series dates must be strictly increasing")
        for v in values:
            if not np.isnan(v) and v > 1.0 + 1e-9:
                raise DataError(f"indicator value {v} exceeds 1")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "notes", tuple(self.notes))

    def gap_count(self) -> int:
        return int(sum(1 for v in self.values if np.isnan(v)))


def correlation_matrix(window: PriceMatrix, input_mode: str = "raw_price"):
    """Pairwise-complete Pearson correlations for one window.

    Returns ``(rho, flagged)`` where ``flagged`` lists ticker pairs with
    zero variance on their overlap (their rho is set to 0). Raises
    ``InsufficientOverlapError`` if any pair overlaps on fewer than
    ``MIN_OVERLAP`` rows.
    """
    if input_mode not in INPUT_MODES:
        raise ConfigError(f"unknown input mode {input_mode!r}")
    x = window.values
    if input_mode == "log_return":
        logp = np.log(x)
        x = logp[1:] - logp[:-1]  # NaN whenever either endpoint is missing
    rows, n = x.shape
    if rows < MIN_OVERLAP:
        raise InsufficientOverlapError(
            f"window provides {rows} usable rows; need >= {MIN_OVERLAP}")

    mask = (~np.isnan(x)).astype(float)
    # Column-centred values stabilise the cross moments; pairwise means
    # are restored inside the correlation identity below, which is exact
    # under any constant shift per column.
    centred = np.where(mask > 0.0, x - np.nanmean(x, axis=0), 0.0)

    overlap = mask.T @ mask                  # co-present row counts
    s1 = centred.T @ mask                    # sum of x over co-present rows
    s2 = (centred * centred).T @ mask        # sum of x^2 over co-present rows
    cross = centred.T @ centred              # sum of x*y over co-present rows

    off = ~np.eye(n, dtype=bool)
    if np.any(overlap[off] < MIN_OVERLAP):
        i, j = np.argwhere((overlap < MIN_OVERLAP) & off)[0]
        raise InsufficientOverlapError(
            f"{window.tickers[i]}/{window.tickers[j]} overlap on "
            f"{int(overlap[i, j])} rows; need >= {MIN_OVERLAP}")

    cov = overlap * cross - s1 * s1.T
    var_x = overlap * s2 - s1 * s1
    var_y = var_x.T
    scale = np.maximum(overlap * s2, 1.0)
    degenerate = (var_x <= 1e-14 * scale) | (var_y <= 1e-14 * scale.T)

    denom2 = np.maximum(var_x, 0.0) * np.maximum(var_y, 0.0)
    denom = np.sqrt(denom2)
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(degenerate, 0.0, cov / np.where(denom > 0.0, denom, 1.0))
    # Cauchy-Schwarz holds with equality exactly when the overlapping
    # observations are affinely related. Neither the square root above
    # nor the two moment products (computed by separate matrix products
    # with their own summation orders) are reliable to the last bit, so
    # treat |rho| within 5e-13 of 1 as the affine case and snap it; any
    # non-degenerate sample lies far below that.
    affine = ~degenerate & (denom2 > 0.0) & (cov * cov >= denom2 * (1.0 - 1e-12))
    rho = np.where(affine, np.sign(cov), rho)
    rho = np.clip(rho, -1.0, 1.0)
    rho = (rho + rho.T) / 2.0
    np.fill_diagonal(rho, 1.0)

    flagged = tuple((window.tickers[i], window.tickers[j])
                    for i, j in np.argwhere(np.triu(degenerate, 1)))
    return rho, flagged


def distance_from_correlation(rho: np.ndarray, transform: DistanceTransform) -> np.ndarray:
    """Apply a distance transform, validating the correlation matrix."""
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DataError("correlation matrix must be square")
    if np.max(np.abs(rho - rho.T)) > 1e-9:
        raise DataError("correlation matrix must be symmetric")
    if np.max(np.abs(rho)) > 1.0 + 1e-9:
        raise DataError("correlations outside [-1, 1]")
    if np.max(np.abs(np.diag(rho) - 1.0)) > 1e-9:
        raise DataError("correlation diagonal must be 1")
    return transform.apply(np.clip(rho, -1.0, 1.0))


def window_graph(window: PriceMatrix, config: WindowConfig) -> MarketGraph:
    """Filtered correlation network for one window: MST + high-rho edges."""
    rho, _ = correlation_matrix(window, config.input_mode)
    dist = distance_from_correlation(rho, config.transform)
    base = build_complete_graph(dist, rho, nodes=window.tickers)
    tree = minimum_spanning_tree(base)
    return augment_high_value_edges(tree, base, config.xi)


def _window_value(prices: PriceMatrix, k: int, config: WindowConfig):
    """One indicator point; returns (value, note_or_None).

    Slicing happens inside the error boundary: a window where some
    ticker has no observation at all is a data problem scoped to that
    window, so it gaps the point instead of aborting the series.
    """
    try:
        window = prices.window(k, k + config.T)
        graph = window_graph(window, config)
        report = average_curvature(graph, mode=config.averaging_mode,
                                   weighting=config.weighting)
        return report.average, None
    except DataError as exc:
        return float("nan"), str(exc)


def _values_for_range(prices: PriceMatrix, config: WindowConfig, lo: int, hi: int):
    out = []
    for k in range(lo, hi):
        value, note = _window_value(prices, k, config)
        label = prices.dates[k + config.T - 1]
        out.append((label, value, note))
    return out


def indicator_series(prices: PriceMatrix, config: WindowConfig,
                     jobs: int = 1) -> IndicatorSeries:
    """Roll the window over the panel, one value per window-end date.

    Requires at least ``T + 1`` rows so the series has two or more
    points. ``jobs > 1`` splits the window range across processes; the
    result is identical to the serial run.
    """
    if prices.n_dates < config.T + 1:
        raise ConfigError(
            f"panel has {prices.n_dates} rows; need at least T + 1 = {config.T + 1}")
    if prices.n_tickers < 2:
        raise DataError("need at least two tickers")
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")

    count = prices.n_dates - config.T + 1
    if jobs == 1 or count < 4:
        triples = _values_for_range(prices, config, 0, count)
    else:
        jobs = min(jobs, count)
        bounds = np.linspace(0, count, jobs + 1).astype(int)
        chunks = [(int(lo), int(hi)) for lo, hi in zip(bounds, bounds[1:]) if lo < hi]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_values_for_range, prices, config, lo, hi)
                       for lo, hi in chunks]
            triples = [t for f in futures for t in f.result()]

    dates = tuple(t[0] for t in triples)
    values = tuple(t[1] for t in triples)
    notes = tuple(f"{t[0]}: {t[2]}" for t in triples if t[2] is not None)
    return IndicatorSeries(dates=dates, values=values, config=config, notes=notes)


# ---------------------------------------------------------------------------
# Serialisation
# ---------------------------------------------------------------------------


def write_series_csv(series: IndicatorSeries, path) -> None:
    """Two columns, ``date,value``; gaps are written as ``nan``."""
    with open(path, "w", newline="") as fh:
        fh.write("date,value\n")
        for d, v in zip(series.dates, series.values):
            fh.write(f"{d},{'nan' if np.isnan(v) else repr(v)}\n")


def write_series_json(series: IndicatorSeries, path) -> None:
    """Config plus dated records; gaps serialise as JSON null."""
    payload = {
        "config": series.config.to_dict(),
        "series": [
            {"date": d, "value": (None if np.isnan(v) else v)}
            for d, v in zip(series.dates, series.values)
        ],
        "notes": list(series.notes),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_sweep_csv(series_by_value: dict, path, parameter: str) -> None:
    """Column-aligned sweep table: ``date`` plus one column per value."""
    items = list(series_by_value.items())
    if not items:
        raise ConfigError("empty sweep")
    dates = items[0][1].dates
    for _, s in items:
        if s.dates != dates:
            raise DataError("sweep series are not column-aligned")
    with open(path, "w", newline="") as fh:
        fh.write("date," + ",".join(f"{parameter}={v:g}" for v, _ in items) + "\n")
        for i, d in enumerate(dates):
            cells = [d]
            for _, s in items:
                v = s.values[i]
                cells.append("nan" if np.isnan(v) else repr(v))
            fh.write(",".join(cells) + "\n")
