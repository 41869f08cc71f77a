"""Backtesting: forecasts against held-out prices, MSE and CI coverage.

The headline error number is the raw mean squared price error times 100
("MSE percent").  A model is judged suitable when that number is below 10,
or, failing that, when every actual price fell inside its forecast interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, LengthMismatch
from .gbm import ForecastPoint, GbmParams, forecast
from .ingest import PriceSeries

MSE_PERCENT_SUITABLE = 10.0


@dataclass(frozen=True)
class StepComparison:
    step: int
    expected_price: float
    actual_price: float
    ci_lower: float
    ci_upper: float
    inside_ci: bool


@dataclass(frozen=True)
class BacktestResult:
    """Per-step comparisons plus the aggregate error and coverage verdict."""

    per_step: tuple[StepComparison, ...]
    mse: float
    mse_percent: float
    coverage: float
    suitable: bool


def _actual_values(actuals) -> list[float]:
    if isinstance(actuals, PriceSeries):
        return list(actuals.closes)
    return [float(a) for a in actuals]


def evaluate_forecasts(
    forecasts: Sequence[ForecastPoint], actuals: Sequence[float] | PriceSeries
) -> BacktestResult:
    """Score a forecast list against actual prices, step by step.

    CI bounds are closed: an actual exactly on a bound counts as inside.
    """
    values = _actual_values(actuals)
    if len(values) != len(forecasts):
        raise LengthMismatch(
            f"{len(forecasts)} forecasts vs {len(values)} actual prices"
        )
    if not values:
        raise DomainError("cannot evaluate an empty forecast set")
    rows = []
    sq_sum = 0.0
    inside_count = 0
    for fp, actual in zip(forecasts, values):
        inside = fp.ci_lower <= actual <= fp.ci_upper
        inside_count += inside
        sq_sum += (fp.expected_price - actual) ** 2
        rows.append(
            StepComparison(
                step=fp.step,
                expected_price=fp.expected_price,
                actual_price=actual,
                ci_lower=fp.ci_lower,
                ci_upper=fp.ci_upper,
                inside_ci=inside,
            )
        )
    mse = sq_sum / len(values)
    coverage = inside_count / len(values)
    mse_percent = mse * 100.0
    return BacktestResult(
        per_step=tuple(rows),
        mse=mse,
        mse_percent=mse_percent,
        coverage=coverage,
        suitable=mse_percent < MSE_PERCENT_SUITABLE or coverage == 1.0,
    )


def coverage_check(
    forecasts: Sequence[ForecastPoint], actuals: Sequence[float] | PriceSeries
) -> float:
    """Fraction of steps whose actual price lies inside the closed CI."""
    values = _actual_values(actuals)
    if len(values) != len(forecasts):
        raise LengthMismatch(
            f"{len(forecasts)} forecasts vs {len(values)} actual prices"
        )
    if not values:
        raise DomainError("coverage is undefined for empty inputs")
    inside = sum(
        1 for fp, actual in zip(forecasts, values) if fp.ci_lower <= actual <= fp.ci_upper
    )
    return inside / len(values)


def backtest(
    params: GbmParams,
    anchor_price: float,
    actuals: Sequence[float] | PriceSeries,
    level: float = 0.95,
) -> BacktestResult:
    """Forecast steps 1..len(actuals) from the anchor price and score them.

    The anchor is the last price preceding the held-out segment; per-step
    expected prices are exactly those of gbm.forecast.
    """
    values = _actual_values(actuals)
    if not values:
        raise DomainError("backtest needs a non-empty actuals segment")
    points = forecast(params, anchor_price, steps=len(values), level=level)
    return evaluate_forecasts(points, values)
