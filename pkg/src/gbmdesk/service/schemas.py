"""Pydantic request/response models for the analysis service."""

from __future__ import annotations

import datetime
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

from ..ingest import Frequency, PriceSeries

FrequencyName = Literal["weekly", "monthly"]
PlotKind = Literal["trend", "histogram", "qq"]


class Observation(BaseModel):
    date: datetime.date
    close: float = Field(gt=0)


class SeriesPayload(BaseModel):
    ticker: str
    frequency: FrequencyName
    observations: list[Observation] = Field(min_length=2)

    def to_price_series(self) -> PriceSeries:
        return PriceSeries(
            ticker=self.ticker,
            frequency=Frequency(self.frequency),
            observations=tuple((o.date, o.close) for o in self.observations),
        )


class BatteryRequest(BaseModel):
    series: SeriesPayload
    alpha: float = Field(default=0.05, gt=0, lt=1)
    hurst_band: float = Field(default=0.1, gt=0)


class TestResultModel(BaseModel):
    statistic: Optional[float] = None
    p_value: Optional[float] = None
    detail: dict[str, Any] = Field(default_factory=dict)


class AssumptionsModel(BaseModel):
    adf: TestResultModel
    shapiro_wilk: TestResultModel
    ljung_box: TestResultModel
    hurst: TestResultModel
    stationary: bool
    normal: bool
    independent: bool
    random_walk: bool
    gbm_suitable: bool
    alpha: float
    hurst_band: float


class FitRequest(BaseModel):
    series: SeriesPayload


class ParamsModel(BaseModel):
    mu: float
    sigma: float
    n_obs: int
    dt_years: float


class ForecastRequest(BaseModel):
    series: SeriesPayload
    horizon: int = Field(default=3, ge=1)
    level: float = Field(default=0.95, gt=0, lt=1)
    current_price: Optional[float] = Field(default=None, gt=0)


class ForecastPointModel(BaseModel):
    step: int
    dt_total: float
    expected_price: float
    variance: float
    ci_lower: float
    ci_upper: float
    level: float


class ForecastResponse(BaseModel):
    ticker: str
    params: ParamsModel
    points: list[ForecastPointModel]


class BacktestRequest(BaseModel):
    series: SeriesPayload
    split_fraction: float = Field(default=0.7, gt=0, lt=1)
    level: float = Field(default=0.95, gt=0, lt=1)


class StepComparisonModel(BaseModel):
    step: int
    expected_price: float
    actual_price: float
    ci_lower: float
    ci_upper: float
    inside_ci: bool


class BacktestModel(BaseModel):
    per_step: list[StepComparisonModel]
    mse: float
    mse_percent: float
    coverage: float
    suitable: bool


class BacktestResponse(BaseModel):
    ticker: str
    params: ParamsModel
    backtest: BacktestModel


class SimulateRequest(BaseModel):
    series: SeriesPayload
    paths: int = Field(default=10000, ge=1)
    seed: int = 0
    dt_total: Optional[float] = Field(default=None, ge=0)
    current_price: Optional[float] = Field(default=None, gt=0)
    include_terminal_prices: bool = False


class SimulateResponse(BaseModel):
    ticker: str
    params: ParamsModel
    paths: int
    seed: int
    dt_total: float
    sample_mean: float
    sample_variance: float
    terminal_prices: Optional[list[float]] = None


class ReportRequest(BaseModel):
    series: SeriesPayload
    alpha: float = Field(default=0.05, gt=0, lt=1)
    level: float = Field(default=0.95, gt=0, lt=1)
    split_fraction: float = Field(default=0.7, gt=0, lt=1)
    horizon: int = Field(default=3, ge=1)
    seed: int = 0
    force_fit: bool = False
    hurst_band: float = Field(default=0.1, gt=0)


class OptionsModel(BaseModel):
    alpha: float
    level: float
    split_fraction: float
    horizon: int
    seed: int
    force_fit: bool
    hurst_band: float


class ReportModel(BaseModel):
    ticker: str
    frequency: FrequencyName
    options: OptionsModel
    assumptions: Optional[AssumptionsModel] = None
    params: Optional[ParamsModel] = None
    forecasts: Optional[list[ForecastPointModel]] = None
    backtest: Optional[BacktestModel] = None
    warnings: list[str] = Field(default_factory=list)
    error: Optional[str] = None


class PlotDataRequest(BaseModel):
    series: SeriesPayload
    kind: PlotKind


class ErrorModel(BaseModel):
    error: str
    detail: str


class HealthModel(BaseModel):
    status: str
    version: str
