"""Tests for the rolling-indicator pipeline: correlations, transforms,
window graphs, series assembly, and serialisation."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ricci_fragility.errors import (
    ConfigError,
    DataError,
    InsufficientOverlapError,
)
from ricci_fragility.indicator import (
    DistanceTransform,
    IndicatorSeries,
    WindowConfig,
    correlation_matrix,
    distance_from_correlation,
    indicator_series,
    window_graph,
    write_series_csv,
    write_series_json,
    write_sweep_csv,
)
from ricci_fragility.ingestion import PriceMatrix
from ricci_fragility.synthetic import comoving, iid
from ricci_fragility.transport import average_curvature


def make_panel(values, start_day=1):
    values = np.asarray(values, dtype=float)
    rows, cols = values.shape
    dates = [f"2020-03-{start_day + i:02d}" for i in range(rows)]
    tickers = [f"S{j}" for j in range(cols)]
    return PriceMatrix(dates=tuple(dates), tickers=tuple(tickers), values=values)


class TestDistanceTransform:
    def test_parse_and_label(self):
        assert DistanceTransform.parse("sqrt").kind == "sqrt_ultrametric"
        assert DistanceTransform.parse("log1p").kind == "log1p_scaled"
        t = DistanceTransform.parse("power:0.5")
        assert t.kind == "power" and t.p == 0.5
        assert DistanceTransform.parse("sqrt").label() == "sqrt"
        assert t.label() == "power:0.5"
        assert DistanceTransform.parse("log1p").label() == "log1p"

    def test_parse_errors(self):
        for bad in ("cosine", "power:", "power:zero", "power:-1", "power:0"):
            with pytest.raises(ConfigError):
                DistanceTransform.parse(bad)

    def test_constructor_validation(self):
        with pytest.raises(ConfigError):
            DistanceTransform("power")  # missing exponent
        with pytest.raises(ConfigError):
            DistanceTransform("sqrt_ultrametric", p=2.0)  # stray exponent
        with pytest.raises(ConfigError):
            DistanceTransform("nope")

    def test_sqrt_formula(self):
        rho = np.array([[1.0, 0.5], [0.5, 1.0]])
        d = DistanceTransform().apply(rho)
        assert d[0, 1] == pytest.approx(math.sqrt(1.0), abs=1e-15)
        assert d[0, 0] == 0.0
        rho = np.array([[1.0, -1.0], [-1.0, 1.0]])
        assert DistanceTransform().apply(rho)[0, 1] == pytest.approx(2.0, abs=1e-15)

    def test_power_and_log1p_formulas(self):
        rho = np.array([[1.0, 0.25], [0.25, 1.0]])
        spread = 2.0 * (1.0 - 0.25)
        assert DistanceTransform("power", p=1.0).apply(rho)[0, 1] == pytest.approx(spread)
        assert DistanceTransform("power", p=2.0).apply(rho)[0, 1] == pytest.approx(spread ** 2)
        assert DistanceTransform("log1p_scaled").apply(rho)[0, 1] == pytest.approx(
            math.log1p(spread))

    @settings(max_examples=30, deadline=None)
    @given(rho=st.floats(-1.0, 1.0), rho2=st.floats(-1.0, 1.0))
    def test_decreasing_in_rho(self, rho, rho2):
        lo, hi = min(rho, rho2), max(rho, rho2)
        for t in (DistanceTransform(), DistanceTransform("power", p=0.7),
                  DistanceTransform("log1p_scaled")):
            m_lo = t.apply(np.array([[1.0, lo], [lo, 1.0]]))[0, 1]
            m_hi = t.apply(np.array([[1.0, hi], [hi, 1.0]]))[0, 1]
            assert m_lo >= m_hi - 1e-12


class TestWindowConfig:
    def test_defaults(self):
        cfg = WindowConfig()
        assert cfg.T == 132 and cfg.xi == 0.85
        assert cfg.transform.kind == "sqrt_ultrametric"
        assert cfg.averaging_mode == "edges"
        assert cfg.weighting == "edge_weight"
        assert cfg.input_mode == "raw_price"

    def test_validation(self):
        with pytest.raises(ConfigError):
            WindowConfig(T=2)
        with pytest.raises(ConfigError):
            WindowConfig(xi=1.5)
        with pytest.raises(ConfigError):
            WindowConfig(averaging_mode="both")
        with pytest.raises(ConfigError):
            WindowConfig(weighting="degree")
        with pytest.raises(ConfigError):
            WindowConfig(input_mode="returns")

    def test_to_dict(self):
        d = WindowConfig(T=22, xi=0.7).to_dict()
        assert d["T"] == 22 and d["xi"] == 0.7 and d["distance"] == "sqrt"


class TestIndicatorSeries:
    def test_gap_count_and_validation(self):
        s = IndicatorSeries(dates=("2020-01-01", "2020-01-02"),
                            values=(0.5, float("nan")), config=WindowConfig())
        assert s.gap_count() == 1
        with pytest.raises(DataError):
            IndicatorSeries(dates=("2020-01-02", "2020-01-01"),
                            values=(0.1, 0.2), config=WindowConfig())
        with pytest.raises(DataError):
            IndicatorSeries(dates=("2020-01-01",), values=(1.5,), config=WindowConfig())
        with pytest.raises(DataError):
            IndicatorSeries(dates=("2020-01-01",), values=(0.1, 0.2),
                            config=WindowConfig())


class TestCorrelationMatrix:
    def test_matches_corrcoef_complete_data(self):
        rng = np.random.default_rng(3)
        panel = make_panel(rng.uniform(50, 150, size=(20, 4)))
        rho, flagged = correlation_matrix(panel)
        assert flagged == ()
        expected = np.corrcoef(panel.values.T)
        np.testing.assert_allclose(rho, expected, atol=1e-12)

    def test_log_return_mode(self):
        rng = np.random.default_rng(4)
        panel = make_panel(rng.uniform(50, 150, size=(15, 3)))
        rho, _ = correlation_matrix(panel, "log_return")
        rets = np.diff(np.log(panel.values), axis=0)
        np.testing.assert_allclose(rho, np.corrcoef(rets.T), atol=1e-12)

    def test_pairwise_complete_uses_overlap_only(self):
        rng = np.random.default_rng(5)
        values = rng.uniform(50, 150, size=(12, 3))
        values[0:4, 2] = np.nan
        panel = make_panel(values)
        rho, _ = correlation_matrix(panel)
        sub = panel.values[4:, :]  # rows where S2 is present
        expected = np.corrcoef(sub[:, 0], sub[:, 2])[0, 1]
        assert rho[0, 2] == pytest.approx(expected, abs=1e-12)
        full = np.corrcoef(panel.values[:, 0], panel.values[:, 1])[0, 1]
        assert rho[0, 1] == pytest.approx(full, abs=1e-12)

    def test_insufficient_overlap_names_tickers(self):
        values = np.array([
            [1.0, np.nan],
            [2.0, np.nan],
            [3.0, np.nan],
            [np.nan, 4.0],
            [np.nan, 5.0],
        ])
        panel = make_panel(values)
        with pytest.raises(InsufficientOverlapError, match="S0/S1"):
            correlation_matrix(panel)

    def test_too_few_rows(self):
        panel = make_panel([[1.0, 2.0], [1.1, 2.1]])
        with pytest.raises(InsufficientOverlapError):
            correlation_matrix(panel)

    def test_constant_series_flagged_zero(self):
        values = np.column_stack([
            np.full(10, 42.0),
            np.linspace(10, 20, 10),
            np.linspace(30, 10, 10),
        ])
        panel = make_panel(values)
        rho, flagged = correlation_matrix(panel)
        assert ("S0", "S1") in flagged and ("S0", "S2") in flagged
        assert rho[0, 1] == 0.0 and rho[0, 2] == 0.0
        assert rho[1, 2] == pytest.approx(-1.0, abs=1e-12)

    def test_bad_mode(self):
        with pytest.raises(ConfigError):
            correlation_matrix(make_panel([[1.0, 2.0]] * 4), "levels")


class TestDistanceFromCorrelation:
    def test_validation(self):
        t = DistanceTransform()
        good = np.array([[1.0, 0.3], [0.3, 1.0]])
        d = distance_from_correlation(good, t)
        assert d[0, 1] == pytest.approx(math.sqrt(2 * 0.7))
        with pytest.raises(DataError):
            distance_from_correlation(np.ones((2, 3)), t)
        with pytest.raises(DataError):
            distance_from_correlation(np.array([[1.0, 0.5], [0.1, 1.0]]), t)
        with pytest.raises(DataError):
            distance_from_correlation(np.array([[1.0, 1.5], [1.5, 1.0]]), t)
        with pytest.raises(DataError):
            distance_from_correlation(np.array([[0.5, 0.3], [0.3, 1.0]]), t)


class TestWindowGraph:
    def test_structure_bounds(self):
        panel = iid(n_assets=6, n_dates=40, seed=11)
        g = window_graph(panel.window(0, 20), WindowConfig(T=20, xi=0.5))
        n = 6
        assert g.n == n
        assert n - 1 <= g.edge_count <= n * (n - 1) // 2
        assert g.is_connected()

    def test_xi_one_keeps_high_rho_edges_only(self):
        panel = iid(n_assets=6, n_dates=40, seed=11)
        g = window_graph(panel.window(0, 20), WindowConfig(T=20, xi=1.0))
        assert g.edge_count == 5  # iid data has no rho == 1, so MST only

    def test_comoving_complete_at_any_xi(self):
        panel = comoving(n_assets=5, n_dates=30, seed=13)
        for xi in (-1.0, 0.0, 1.0):
            g = window_graph(panel.window(0, 12), WindowConfig(T=12, xi=xi))
            assert g.edge_count == 10  # rho == 1 everywhere, all edges admitted


class TestIndicatorSeriesPipeline:
    def test_length_and_labels(self):
        panel = iid(n_assets=5, n_dates=30, seed=11)
        series = indicator_series(panel, WindowConfig(T=10, xi=0.6))
        assert len(series.values) == 21
        assert series.dates == panel.dates[9:]
        assert series.gap_count() == 0

    def test_values_match_per_window_computation(self):
        panel = iid(n_assets=5, n_dates=26, seed=3)
        cfg = WindowConfig(T=12, xi=0.6)
        series = indicator_series(panel, cfg)
        for k in (0, 5, 14):
            g = window_graph(panel.window(k, k + 12), cfg)
            expected = average_curvature(g, mode=cfg.averaging_mode,
                                         weighting=cfg.weighting).average
            assert series.values[k] == expected

    def test_too_short_panel(self):
        panel = iid(n_assets=4, n_dates=10, seed=1)
        with pytest.raises(ConfigError):
            indicator_series(panel, WindowConfig(T=10))

    def test_too_few_tickers(self):
        panel = iid(n_assets=2, n_dates=30, seed=1)
        series = indicator_series(panel, WindowConfig(T=10, xi=0.0))
        assert len(series.values) == 21  # two tickers are allowed

    def test_parallel_matches_serial(self):
        panel = iid(n_assets=5, n_dates=36, seed=8)
        cfg = WindowConfig(T=12, xi=0.6)
        serial = indicator_series(panel, cfg, jobs=1)
        parallel = indicator_series(panel, cfg, jobs=2)
        assert serial.dates == parallel.dates
        assert serial.notes == parallel.notes
        for a, b in zip(serial.values, parallel.values):
            assert (math.isnan(a) and math.isnan(b)) or a == b

    def test_bad_jobs(self):
        panel = iid(n_assets=4, n_dates=30, seed=1)
        with pytest.raises(ConfigError):
            indicator_series(panel, WindowConfig(T=10), jobs=0)

    def test_gap_window_noted_not_fatal(self):
        rng = np.random.default_rng(9)
        values = rng.uniform(50, 150, size=(30, 4))
        values[0:12, 3] = np.nan  # S3 lists late: early windows can't use it
        panel = make_panel(values)
        series = indicator_series(panel, WindowConfig(T=10, xi=0.6))
        assert series.gap_count() > 0
        assert len(series.notes) == series.gap_count()
        assert all(note for note in series.notes)
        assert not math.isnan(series.values[-1])


class TestSerialisation:
    def series(self):
        return IndicatorSeries(
            dates=("2020-01-01", "2020-01-02", "2020-01-03"),
            values=(0.25, float("nan"), -0.5),
            config=WindowConfig(T=10, xi=0.6),
            notes=("2020-01-02: no usable overlap",),
        )

    def test_csv_gaps_written_as_nan(self, tmp_path):
        path = tmp_path / "series.csv"
        write_series_csv(self.series(), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "date,value"
        assert lines[2] == "2020-01-02,nan"
        assert lines[3] == "2020-01-03,-0.5"

    def test_json_gaps_written_as_null(self, tmp_path):
        path = tmp_path / "series.json"
        write_series_json(self.series(), path)
        payload = json.loads(path.read_text())
        assert payload["config"]["T"] == 10
        assert payload["series"][1]["value"] is None
        assert payload["series"][0]["value"] == 0.25
        assert payload["notes"] == ["2020-01-02: no usable overlap"]

    def test_sweep_csv_columns_per_value(self, tmp_path):
        cfg = WindowConfig(T=10, xi=0.6)
        mk = lambda vals: IndicatorSeries(
            dates=("2020-01-01", "2020-01-02"), values=vals, config=cfg)
        path = tmp_path / "sweep.csv"
        write_sweep_csv({0.6: mk((0.1, 0.2)), 0.8: mk((0.0, float("nan")))},
                        path, parameter="xi")
        lines = path.read_text().splitlines()
        assert lines[0] == "date,xi=0.6,xi=0.8"
        assert lines[1] == "2020-01-01,0.1,0.0"
        assert lines[2] == "2020-01-02,0.2,nan"

    def test_sweep_csv_requires_alignment(self, tmp_path):
        cfg = WindowConfig(T=10, xi=0.6)
        a = IndicatorSeries(dates=("2020-01-01",), values=(0.1,), config=cfg)
        b = IndicatorSeries(dates=("2020-01-02",), values=(0.2,), config=cfg)
        with pytest.raises(DataError):
            write_sweep_csv({0.6: a, 0.8: b}, tmp_path / "x.csv", parameter="xi")
