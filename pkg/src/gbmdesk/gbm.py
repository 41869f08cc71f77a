"""GBM parameter estimation, moment forecasts with confidence intervals,
and a seeded Monte Carlo simulator that doubles as an independent oracle.

Parameters are annualized: mu is the drift per year, sigma the volatility
per square-root year.  With log returns r over steps of dt years,
r ~ N((mu - sigma^2/2) dt, sigma^2 dt), so the maximum-likelihood picture is

    sigma = stdev(r) / sqrt(dt)        mu = mean(r) / dt + sigma^2 / 2

and the price forecast at horizon D years from price p is

    E[p_D]   = p exp((mu - sigma^2/2) D)
    var[p_D] = p^2 exp(2 mu D) (exp(sigma^2 D) - 1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SeriesTooShort
from .ingest import ReturnSeries
from .specfun import normal_quantile


@dataclass(frozen=True)
class GbmParams:
    """Annualized drift and volatility plus estimation metadata.

    n_obs is the count of returns used by the fit; it is 0 for parameters
    supplied externally (fixtures, user input) rather than estimated.
    """

    mu: float
    sigma: float
    n_obs: int
    dt_years: float

    def __post_init__(self):
        if self.sigma < 0.0:
            raise DomainError(f"sigma must be non-negative, got {self.sigma}")
        if not (self.dt_years > 0.0):
            raise DomainError(f"dt_years must be positive, got {self.dt_years}")
        if self.n_obs < 0:
            raise DomainError(f"n_obs must be non-negative, got {self.n_obs}")


@dataclass(frozen=True)
class ForecastPoint:
    """Price forecast for one horizon step: moments and confidence interval."""

    step: int
    dt_total: float
    expected_price: float
    variance: float
    ci_lower: float
    ci_upper: float
    level: float


@dataclass(frozen=True)
class SimulationResult:
    """Terminal prices of a seeded Monte Carlo run plus their sample moments."""

    terminal_prices: np.ndarray
    paths: int
    seed: int
    sample_mean: float
    sample_variance: float


def fit_gbm(returns: ReturnSeries) -> GbmParams:
    """Estimate annualized (mu, sigma) from a return series by ML.

    The sample variance uses the n-1 denominator; n_obs records the count so
    the exact n-denominator convention can be reconstructed when needed.
    """
    r = np.asarray(returns.returns, dtype=float)
    n = r.size
    if n < 3:
        raise SeriesTooShort(f"fit_gbm needs >= 3 returns, got {n}")
    dt = returns.dt_years
    m = float(r.mean())
    s2 = float(r.var(ddof=1))
    sigma = math.sqrt(s2 / dt)
    mu = m / dt + 0.5 * sigma * sigma
    return GbmParams(mu=mu, sigma=sigma, n_obs=n, dt_years=dt)


def forecast_moments(params: GbmParams, current_price: float, dt_total: float) -> tuple[float, float]:
    """Expected price and price variance at a horizon of dt_total years."""
    if not (current_price > 0.0 and math.isfinite(current_price)):
        raise DomainError(f"current_price must be positive, got {current_price}")
    if dt_total < 0.0:
        raise DomainError(f"dt_total must be non-negative, got {dt_total}")
    mu, sigma = params.mu, params.sigma
    expected = current_price * math.exp((mu - 0.5 * sigma * sigma) * dt_total)
    variance = (
        current_price * current_price
        * math.exp(2.0 * mu * dt_total)
        * math.expm1(sigma * sigma * dt_total)
    )
    return expected, variance


def forecast_point(
    params: GbmParams,
    current_price: float,
    dt_total: float,
    level: float,
    step: int = 0,
) -> ForecastPoint:
    """One ForecastPoint at an explicit horizon; CI is expected +/- z * sd."""
    if not (0.0 < level < 1.0):
        raise DomainError(f"confidence level must be in (0, 1), got {level}")
    expected, variance = forecast_moments(params, current_price, dt_total)
    z = normal_quantile(0.5 * (1.0 + level))
    sd = math.sqrt(variance)
    return ForecastPoint(
        step=step,
        dt_total=dt_total,
        expected_price=expected,
        variance=variance,
        ci_lower=expected - z * sd,
        ci_upper=expected + z * sd,
        level=level,
    )


def forecast(
    params: GbmParams,
    current_price: float,
    steps: int,
    level: float = 0.95,
) -> list[ForecastPoint]:
    """Forecasts for horizons 1..steps sampling periods from a fixed price.

    Every horizon is anchored on the same current price (no re-anchoring on
    intermediate forecasts): step h uses dt_total = h * dt_years.
    """
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")
    return [
        forecast_point(params, current_price, h * params.dt_years, level, step=h)
        for h in range(1, steps + 1)
    ]


def simulate(
    params: GbmParams,
    current_price: float,
    dt_total: float,
    paths: int,
    seed: int = 0,
) -> SimulationResult:
    """Simulate GBM terminal prices at one horizon, reproducibly.

    Uniform draws come from the counter-based Philox generator keyed by the
    seed, and normals from the Box-Muller transform of consecutive pairs, so
    path i always consumes stream positions 2i and 2i+1: results are
    bit-identical for a given seed, and a longer run extends a shorter one
    without disturbing its paths.
    """
    if paths < 1:
        raise DomainError(f"paths must be >= 1, got {paths}")
    if not (current_price > 0.0 and math.isfinite(current_price)):
        raise DomainError(f"current_price must be positive, got {current_price}")
    if dt_total < 0.0:
        raise DomainError(f"dt_total must be non-negative, got {dt_total}")
    gen = np.random.Generator(np.random.Philox(key=seed & ((1 << 128) - 1)))
    u = gen.random(2 * paths)
    # 1 - u lies in (0, 1], keeping the log finite
    z = np.sqrt(-2.0 * np.log1p(-u[0::2])) * np.cos(2.0 * np.pi * u[1::2])
    mu, sigma = params.mu, params.sigma
    terminal = current_price * np.exp(
        (mu - 0.5 * sigma * sigma) * dt_total + sigma * math.sqrt(dt_total) * z
    )
    mean = float(terminal.mean())
    variance = float(terminal.var(ddof=1)) if paths > 1 else 0.0
    return SimulationResult(
        terminal_prices=terminal,
        paths=paths,
        seed=seed,
        sample_mean=mean,
        sample_variance=variance,
    )


def log_likelihood(params: GbmParams, returns: ReturnSeries) -> float:
    """Exact log-likelihood of the returns under N((mu - sigma^2/2) dt, sigma^2 dt)."""
    if params.sigma <= 0.0:
        raise DomainError(f"log_likelihood requires sigma > 0, got {params.sigma}")
    r = np.asarray(returns.returns, dtype=float)
    dt = returns.dt_years
    mean = (params.mu - 0.5 * params.sigma**2) * dt
    var = params.sigma**2 * dt
    return float(
        -0.5 * r.size * math.log(2.0 * math.pi * var)
        - float(((r - mean) ** 2).sum()) / (2.0 * var)
    )
