"""gbmdesk: GBM suitability testing, fitting, forecasting and backtesting."""

__version__ = "0.1.0"

from .errors import (
    DegenerateSplit,
    DomainError,
    DuplicateDate,
    EmptyFile,
    GbmDeskError,
    IoError,
    LengthMismatch,
    MalformedRow,
    RankDeficient,
    SeriesTooLong,
    SeriesTooShort,
    UnparseableDate,
    ZeroVariance,
)
from .evaluate import BacktestResult, StepComparison, backtest, coverage_check, evaluate_forecasts
from .gbm import (
    ForecastPoint,
    GbmParams,
    SimulationResult,
    fit_gbm,
    forecast,
    forecast_moments,
    forecast_point,
    log_likelihood,
    simulate,
)
from .ingest import (
    Frequency,
    PriceSeries,
    ReturnSeries,
    SplitSeries,
    load_prices,
    log_returns,
    reconstruct_prices,
    split,
)
from .pipeline import (
    AnalysisOptions,
    EquityReport,
    PipelineConfig,
    analyze,
    dumps_canonical,
    emit_plot_data,
    emit_report,
    run_pipeline,
    to_jsonable,
)
from .specfun import OlsFit, chi_square_survival, gamma_p, gamma_q, normal_cdf, normal_quantile, ols
from .stattests import (
    AssumptionReport,
    TestResult,
    adf_test,
    assemble_report,
    hurst_exponent,
    ljung_box,
    run_battery,
    shapiro_wilk,
)
