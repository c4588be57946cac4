"""Deterministic synthetic price panels for experiments and tests.

Three scenarios, all seeded and reproducible:

* ``regime_switch`` — a calm block-correlated phase followed by a
  crisis phase with near-uniform high correlation, for studying how the
  indicator separates the regimes;
* ``iid`` — independent assets whose indicator series should look like
  noise when windows barely overlap;
* ``comoving`` — one common driver, so every correlation is exactly one
  and the network is degenerate (zero distances everywhere).

Prices follow geometric random walks: correlated normal log-returns
accumulated from a common start level.
"""

from __future__ import annotations

import datetime

import numpy as np

from .errors import ConfigError
from .ingestion import PriceMatrix

START_DATE = datetime.date(2000, 1, 3)
START_PRICE = 100.0
DAILY_VOL = 0.02

#: regime_switch layout: five equal sector blocks, calm then crisis.
CALM_ROWS = 400
BLOCK_SIZE = 10
CALM_INTRA_RHO = 0.3
CRISIS_RHO = 0.9


def _dates(n: int) -> tuple:
    return tuple((START_DATE + datetime.timedelta(days=i)).isoformat() for i in range(n))


def _equicorrelated(n: int, rho: float) -> np.ndarray:
    c = np.full((n, n), rho)
    np.fill_diagonal(c, 1.0)
    return c


def _block_correlation(n: int, block: int, rho: float) -> np.ndarray:
    c = np.eye(n)
    for s in range(0, n, block):
        e = min(s + block, n)
        c[s:e, s:e] = _equicorrelated(e - s, rho)
    return c


def _prices_from_returns(returns: np.ndarray) -> np.ndarray:
    log_prices = np.log(START_PRICE) + np.vstack(
        [np.zeros(returns.shape[1]), np.cumsum(returns, axis=0)])
    return np.exp(log_prices)


def _correlated_returns(rng: np.random.Generator, corr: np.ndarray, rows: int) -> np.ndarray:
    chol = np.linalg.cholesky(corr)
    z = rng.standard_normal((rows, corr.shape[0]))
    return DAILY_VOL * (z @ chol.T)


def regime_switch(n_assets: int = 50, n_dates: int = 600, seed: int = 7) -> PriceMatrix:
    """Calm block-correlated phase, then a crisis of near-uniform rho.

    Rows ``0..CALM_ROWS-1`` draw from a block correlation matrix
    (``BLOCK_SIZE``-asset sectors at ``CALM_INTRA_RHO`` inside, zero
    across); later rows draw from an equicorrelated matrix at
    ``CRISIS_RHO``.
    """
    if n_assets < 2 or n_dates < 3:
        raise ConfigError("need at least 2 assets and 3 dates")
    if n_dates <= CALM_ROWS:
        raise ConfigError(f"n_dates must exceed the calm phase ({CALM_ROWS} rows)")
    rng = np.random.default_rng(seed)
    calm = _correlated_returns(rng, _block_correlation(n_assets, BLOCK_SIZE, CALM_INTRA_RHO),
                               CALM_ROWS - 1)
    crisis = _correlated_returns(rng, _equicorrelated(n_assets, CRISIS_RHO),
                                 n_dates - CALM_ROWS)
    returns = np.vstack([calm, crisis])
    return PriceMatrix(dates=_dates(n_dates), tickers=_tickers(n_assets),
                       values=_prices_from_returns(returns))


def iid(n_assets: int = 10, n_dates: int = 800, seed: int = 11) -> PriceMatrix:
    """Independent geometric random walks (population correlation zero)."""
    if n_assets < 2 or n_dates < 3:
        raise ConfigError("need at least 2 assets and 3 dates")
    rng = np.random.default_rng(seed)
    returns = DAILY_VOL * rng.standard_normal((n_dates - 1, n_assets))
    return PriceMatrix(dates=_dates(n_dates), tickers=_tickers(n_assets),
                       values=_prices_from_returns(returns))


def comoving(n_assets: int = 8, n_dates: int = 300, seed: int = 13) -> PriceMatrix:
    """One common driver: every pairwise correlation is exactly one.

    Assets differ only in their start level, so raw prices (and log
    returns) are perfectly correlated and all distances collapse to
    zero — the degenerate stress case for the network construction.
    Levels are powers of two, which scale floats exactly, so the
    computed Pearson correlation is 1.0 to the last bit and the rho >= xi
    rule admits every edge even at xi = 1.
    """
    if n_assets < 2 or n_dates < 3:
        raise ConfigError("need at least 2 assets and 3 dates")
    rng = np.random.default_rng(seed)
    common = DAILY_VOL * rng.standard_normal((n_dates - 1, 1))
    returns = np.repeat(common, n_assets, axis=1)
    levels = np.ldexp(1.0, rng.integers(-3, 4, size=n_assets))
    prices = _prices_from_returns(returns) * levels
    return PriceMatrix(dates=_dates(n_dates), tickers=_tickers(n_assets), values=prices)


def _tickers(n: int) -> tuple:
    return tuple(f"A{i:03d}" for i in range(n))


#: Registry used by the CLI's --synthetic flag.
SCENARIOS = {
    "regime_switch": regime_switch,
    "iid": iid,
    "comoving": comoving,
}


def make(name: str, **kwargs) -> PriceMatrix:
    """Instantiate a named scenario with default parameters."""
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    return SCENARIOS[name](**kwargs)
