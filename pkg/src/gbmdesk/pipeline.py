"""Per-equity analysis pipeline and report/plot-data emission.

The pipeline runs ingest -> assumption battery -> gate -> fit -> forward
forecast -> backtest for each input file and produces one report per file,
independent of the others.  Reports serialize as canonical JSON: keys
sorted, floats printed with 17 significant digits (round-trip exact),
non-finite floats as null, so identical inputs yield identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import DomainError, GbmDeskError, IoError, SeriesTooShort
from .evaluate import BacktestResult, backtest
from .gbm import ForecastPoint, GbmParams, fit_gbm, forecast
from .ingest import Frequency, PriceSeries, ReturnSeries, load_prices, log_returns, split
from .specfun import normal_quantile
from .stattests import (
    DEFAULT_ALPHA,
    DEFAULT_HURST_BAND,
    AssumptionReport,
    run_battery,
)


@dataclass(frozen=True)
class AnalysisOptions:
    """Knobs for a single-equity analysis run."""

    alpha: float = DEFAULT_ALPHA
    level: float = 0.95
    split_fraction: float = 0.7
    horizon: int = 3
    seed: int = 0
    force_fit: bool = False
    hurst_band: float = DEFAULT_HURST_BAND


@dataclass(frozen=True)
class PipelineConfig:
    """Batch configuration: input files plus shared analysis options."""

    inputs: tuple[str, ...]
    frequency: Frequency
    options: AnalysisOptions = field(default_factory=AnalysisOptions)


@dataclass
class EquityReport:
    """Everything the pipeline produced for one equity.

    The model sections (params, forecasts, backtest) are present only when
    the assumption battery passed or the gate was explicitly overridden;
    overrides and gate failures are spelled out in warnings.  A hard error
    (unreadable input, degenerate series) leaves only the error message.
    """

    ticker: str
    frequency: Frequency
    options: AnalysisOptions
    assumptions: AssumptionReport | None = None
    params: GbmParams | None = None
    forecasts: list[ForecastPoint] | None = None
    backtest: BacktestResult | None = None
    warnings: list[str] = field(default_factory=list)
    error: str | None = None


_GATE_MESSAGES = (
    ("stationary", "stationarity rejected"),
    ("normal", "normality rejected"),
    ("independent", "independence rejected"),
    ("random_walk", "random-walk band violated"),
)


def analyze(prices: PriceSeries, options: AnalysisOptions) -> EquityReport:
    """Run the full pipeline for one price series.

    The battery and the fit use the training portion of the chronological
    split; the backtest compares against the held-out prices from the last
    training price; the forward forecasts extend `horizon` steps past the
    final observed close.
    """
    report = EquityReport(ticker=prices.ticker, frequency=prices.frequency, options=options)
    try:
        parts = split(prices, options.split_fraction)
        train_returns = log_returns(parts.train)
        report.assumptions = run_battery(
            train_returns, alpha=options.alpha, hurst_band=options.hurst_band
        )
        for verdict, message in _GATE_MESSAGES:
            if not getattr(report.assumptions, verdict):
                report.warnings.append(message)
        if not report.assumptions.gbm_suitable and not options.force_fit:
            return report
        if not report.assumptions.gbm_suitable:
            report.warnings.append(
                "assumption gate overridden by force-fit; model sections are not endorsed"
            )
        report.params = fit_gbm(train_returns)
        anchor = parts.train.closes[-1]
        report.backtest = backtest(
            report.params, anchor, parts.test, level=options.level
        )
        report.forecasts = forecast(
            report.params,
            prices.closes[-1],
            steps=options.horizon,
            level=options.level,
        )
    except GbmDeskError as exc:
        report.error = f"{type(exc).__name__}: {exc}"
    return report


def run_pipeline(config: PipelineConfig) -> list[EquityReport]:
    """Process every input file; per-equity failures never abort the batch.

    The ticker is the input file's stem.  Callers decide the exit status
    from the reports' error fields.
    """
    reports = []
    for path in config.inputs:
        ticker = Path(path).stem
        try:
            prices = load_prices(path, ticker=ticker, frequency=config.frequency)
        except (GbmDeskError, OSError) as exc:
            reports.append(
                EquityReport(
                    ticker=ticker,
                    frequency=config.frequency,
                    options=config.options,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
            continue
        reports.append(analyze(prices, config.options))
    return reports


# ---------------------------------------------------------------------------
# Plot-ready data
# ---------------------------------------------------------------------------

PLOT_KINDS = ("trend", "histogram", "qq")


def emit_plot_data(returns: ReturnSeries, kind: str) -> str:
    """CSV payload for one of the three return diagnostics.

    trend:     index,return          one row per return, index 1..n
    histogram: bin_left,bin_right,count   ceil(sqrt(n)) equal-width bins
    qq:        theoretical_quantile,sample_quantile   positions (i-0.5)/n
    """
    values = list(returns.returns)
    n = len(values)
    if n < 2:
        raise SeriesTooShort(f"plot data needs >= 2 returns, got {n}")
    if kind == "trend":
        lines = ["index,return"]
        lines += [f"{i},{_fmt(v)}" for i, v in enumerate(values, start=1)]
    elif kind == "histogram":
        lines = ["bin_left,bin_right,count"]
        lo, hi = min(values), max(values)
        if lo == hi:
            lines.append(f"{_fmt(lo)},{_fmt(hi)},{n}")
        else:
            bins = math.ceil(math.sqrt(n))
            width = (hi - lo) / bins
            counts = [0] * bins
            for v in values:
                idx = min(int((v - lo) / width), bins - 1)
                counts[idx] += 1
            for b in range(bins):
                left = lo + b * width
                right = hi if b == bins - 1 else lo + (b + 1) * width
                lines.append(f"{_fmt(left)},{_fmt(right)},{counts[b]}")
    elif kind == "qq":
        lines = ["theoretical_quantile,sample_quantile"]
        ordered = sorted(values)
        for i in range(1, n + 1):
            theo = normal_quantile((i - 0.5) / n)
            lines.append(f"{_fmt(theo)},{_fmt(ordered[i - 1])}")
    else:
        raise DomainError(f"unknown plot kind {kind!r}; expected one of {PLOT_KINDS}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Canonical JSON report emission
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any IEEE double exactly."""
    return format(float(x), ".17g")


def _jsonable(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, Frequency):
        return value.value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "tolist"):  # numpy scalars and arrays
        return _jsonable(value.tolist())
    return _jsonable(asdict(value))


def to_jsonable(report: EquityReport) -> dict:
    """Plain-dict form of a report with every section key always present."""
    assumptions = None
    if report.assumptions is not None:
        a = report.assumptions
        assumptions = {
            "adf": _jsonable(a.adf),
            "shapiro_wilk": _jsonable(a.shapiro_wilk),
            "ljung_box": _jsonable(a.ljung_box),
            "hurst": _jsonable(a.hurst),
            "stationary": a.stationary,
            "normal": a.normal,
            "independent": a.independent,
            "random_walk": a.random_walk,
            "gbm_suitable": a.gbm_suitable,
            "alpha": a.alpha,
            "hurst_band": a.hurst_band,
        }
    return {
        "ticker": report.ticker,
        "frequency": report.frequency.value,
        "options": _jsonable(report.options),
        "assumptions": assumptions,
        "params": _jsonable(report.params) if report.params is not None else None,
        "forecasts": _jsonable(report.forecasts) if report.forecasts is not None else None,
        "backtest": _jsonable(report.backtest) if report.backtest is not None else None,
        "warnings": list(report.warnings),
        "error": report.error,
    }


def dumps_canonical(value) -> str:
    """Deterministic JSON: sorted keys, .17g floats, no insignificant spaces."""
    return _dumps(_jsonable(value))


def _dumps(value) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _fmt(value)
    if isinstance(value, str):
        return _dumps_str(value)
    if isinstance(value, dict):
        items = sorted(value.items())
        inner = ",".join(f"{_dumps_str(str(k))}:{_dumps(v)}" for k, v in items)
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_dumps(v) for v in value) + "]"
    raise IoError(f"cannot serialize {type(value).__name__} to JSON")


_STR_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\b": "\\b",
    "\f": "\\f",
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def _dumps_str(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch in _STR_ESCAPES:
            out.append(_STR_ESCAPES[ch])
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def emit_report(report: EquityReport | dict, path) -> None:
    """Write a report (or an already-jsonable dict) as canonical JSON."""
    payload = to_jsonable(report) if isinstance(report, EquityReport) else report
    text = dumps_canonical(payload) + "\n"
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write report to {path}: {exc}") from exc
