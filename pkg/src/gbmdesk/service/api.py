"""Service operations: plain functions from request models to response models.

The FastAPI routes delegate here, and the CLI's in-process backend calls
these functions directly, so both transports share one code path.
"""

from __future__ import annotations

import math

from .. import pipeline
from ..evaluate import backtest as run_backtest
from ..gbm import fit_gbm, forecast, simulate
from ..ingest import log_returns, split
from ..stattests import AssumptionReport, TestResult, run_battery
from . import schemas


def _finite_or_none(x: float | None) -> float | None:
    if x is None or not math.isfinite(x):
        return None
    return x


def _test_result_model(result: TestResult) -> schemas.TestResultModel:
    return schemas.TestResultModel(
        statistic=_finite_or_none(result.statistic),
        p_value=_finite_or_none(result.p_value),
        detail=result.detail,
    )


def _assumptions_model(report: AssumptionReport) -> schemas.AssumptionsModel:
    return schemas.AssumptionsModel(
        adf=_test_result_model(report.adf),
        shapiro_wilk=_test_result_model(report.shapiro_wilk),
        ljung_box=_test_result_model(report.ljung_box),
        hurst=_test_result_model(report.hurst),
        stationary=report.stationary,
        normal=report.normal,
        independent=report.independent,
        random_walk=report.random_walk,
        gbm_suitable=report.gbm_suitable,
        alpha=report.alpha,
        hurst_band=report.hurst_band,
    )


def battery(req: schemas.BatteryRequest) -> schemas.AssumptionsModel:
    prices = req.series.to_price_series()
    report = run_battery(log_returns(prices), alpha=req.alpha, hurst_band=req.hurst_band)
    return _assumptions_model(report)


def fit(req: schemas.FitRequest) -> schemas.ParamsModel:
    prices = req.series.to_price_series()
    params = fit_gbm(log_returns(prices))
    return schemas.ParamsModel(**params.__dict__)


def forecast_series(req: schemas.ForecastRequest) -> schemas.ForecastResponse:
    prices = req.series.to_price_series()
    params = fit_gbm(log_returns(prices))
    price = req.current_price if req.current_price is not None else prices.closes[-1]
    points = forecast(params, price, steps=req.horizon, level=req.level)
    return schemas.ForecastResponse(
        ticker=prices.ticker,
        params=schemas.ParamsModel(**params.__dict__),
        points=[schemas.ForecastPointModel(**p.__dict__) for p in points],
    )


def backtest_series(req: schemas.BacktestRequest) -> schemas.BacktestResponse:
    prices = req.series.to_price_series()
    parts = split(prices, req.split_fraction)
    params = fit_gbm(log_returns(parts.train))
    result = run_backtest(params, parts.train.closes[-1], parts.test, level=req.level)
    return schemas.BacktestResponse(
        ticker=prices.ticker,
        params=schemas.ParamsModel(**params.__dict__),
        backtest=schemas.BacktestModel(
            per_step=[schemas.StepComparisonModel(**s.__dict__) for s in result.per_step],
            mse=result.mse,
            mse_percent=result.mse_percent,
            coverage=result.coverage,
            suitable=result.suitable,
        ),
    )


def simulate_series(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
    prices = req.series.to_price_series()
    params = fit_gbm(log_returns(prices))
    dt_total = req.dt_total if req.dt_total is not None else params.dt_years
    price = req.current_price if req.current_price is not None else prices.closes[-1]
    result = simulate(params, price, dt_total, paths=req.paths, seed=req.seed)
    terminal = result.terminal_prices.tolist() if req.include_terminal_prices else None
    return schemas.SimulateResponse(
        ticker=prices.ticker,
        params=schemas.ParamsModel(**params.__dict__),
        paths=result.paths,
        seed=result.seed,
        dt_total=dt_total,
        sample_mean=result.sample_mean,
        sample_variance=result.sample_variance,
        terminal_prices=terminal,
    )


def report(req: schemas.ReportRequest) -> schemas.ReportModel:
    prices = req.series.to_price_series()
    options = pipeline.AnalysisOptions(
        alpha=req.alpha,
        level=req.level,
        split_fraction=req.split_fraction,
        horizon=req.horizon,
        seed=req.seed,
        force_fit=req.force_fit,
        hurst_band=req.hurst_band,
    )
    equity_report = pipeline.analyze(prices, options)
    return schemas.ReportModel.model_validate(pipeline.to_jsonable(equity_report))


def plotdata(req: schemas.PlotDataRequest) -> str:
    prices = req.series.to_price_series()
    return pipeline.emit_plot_data(log_returns(prices), req.kind)
