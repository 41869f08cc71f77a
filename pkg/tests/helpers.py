"""Shared builders for the test suite."""

import datetime

import numpy as np

from gbmdesk import Frequency, PriceSeries, ReturnSeries


def philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def make_dates(n, frequency=Frequency.MONTHLY, start=datetime.date(2000, 1, 31)):
    step = 31 if frequency is Frequency.MONTHLY else 7
    return [start + datetime.timedelta(days=step * i) for i in range(n)]


def price_series(closes, ticker="SYN", frequency=Frequency.MONTHLY) -> PriceSeries:
    dates = make_dates(len(closes), frequency)
    obs = tuple((d, float(c)) for d, c in zip(dates, closes))
    return PriceSeries(ticker=ticker, frequency=frequency, observations=obs)


def return_series(returns, ticker="SYN", frequency=Frequency.MONTHLY) -> ReturnSeries:
    return ReturnSeries(
        ticker=ticker,
        frequency=frequency,
        returns=tuple(float(r) for r in returns),
        dt_years=frequency.dt_years,
    )


def gbm_monthly_closes(seed=3, n_prices=240, mean=0.004165, sd=0.0764, p0=3.0):
    """Synthetic GBM-like monthly closes; seed 3 passes the full battery."""
    rng = philox(seed)
    rets = rng.normal(mean, sd, size=n_prices - 1)
    log_path = np.concatenate([[0.0], np.cumsum(rets)])
    return (p0 * np.exp(log_path)).tolist()


def heavy_tailed_weekly_closes(seed=0, n_prices=260, scale=0.03, p0=5.0):
    """Fat-tailed weekly closes; normality is rejected for seed 0."""
    rng = philox(seed)
    rets = rng.standard_t(2, size=n_prices - 1) * scale
    log_path = np.concatenate([[0.0], np.cumsum(rets)])
    return (p0 * np.exp(log_path)).tolist()


def write_price_csv(path, closes, frequency=Frequency.MONTHLY):
    dates = make_dates(len(closes), frequency)
    lines = ["date,close"]
    lines += [f"{d.isoformat()},{repr(float(c))}" for d, c in zip(dates, closes)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
