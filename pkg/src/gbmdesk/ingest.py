"""Price data ingestion: CSV loading, log returns, chronological splits.

Input files carry one equity at one sampling frequency, with the exact
header ``date,close``, ISO-8601 dates and strictly positive closes.
All types in here are immutable; every operation returns a new value.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from datetime import date as Date
from enum import Enum

from .errors import (
    DegenerateSplit,
    DomainError,
    DuplicateDate,
    EmptyFile,
    MalformedRow,
    SeriesTooShort,
    UnparseableDate,
)


class Frequency(str, Enum):
    WEEKLY = "weekly"
    MONTHLY = "monthly"

    @property
    def dt_years(self) -> float:
        """Year fraction per observation step: 1/52 weekly, 1/12 monthly."""
        return 1.0 / 52.0 if self is Frequency.WEEKLY else 1.0 / 12.0


@dataclass(frozen=True)
class PriceSeries:
    """Ordered, strictly positive closing prices for one equity.

    Observations are (date, close) pairs sorted strictly ascending by date.
    At least two observations are required (returns are taken later).
    """

    ticker: str
    frequency: Frequency
    observations: tuple[tuple[Date, float], ...]

    def __post_init__(self):
        if len(self.observations) < 2:
            raise SeriesTooShort(
                f"{self.ticker}: need at least 2 observations, got {len(self.observations)}"
            )
        prev: Date | None = None
        for d, close in self.observations:
            if not math.isfinite(close) or close <= 0.0:
                raise MalformedRow(f"{self.ticker}: non-positive close {close!r} on {d}")
            if prev is not None:
                if d == prev:
                    raise DuplicateDate(f"{self.ticker}: duplicate date {d}")
                if d < prev:
                    raise MalformedRow(f"{self.ticker}: dates out of order at {d}")
            prev = d

    def __len__(self) -> int:
        return len(self.observations)

    @property
    def dates(self) -> tuple[Date, ...]:
        return tuple(d for d, _ in self.observations)

    @property
    def closes(self) -> tuple[float, ...]:
        return tuple(c for _, c in self.observations)


@dataclass(frozen=True)
class ReturnSeries:
    """Log returns of a PriceSeries, with the sampling interval in years."""

    ticker: str
    frequency: Frequency
    returns: tuple[float, ...]
    dt_years: float

    def __post_init__(self):
        if len(self.returns) < 1:
            raise SeriesTooShort(f"{self.ticker}: empty return series")
        if not (self.dt_years > 0.0):
            raise DomainError(f"dt_years must be positive, got {self.dt_years}")

    def __len__(self) -> int:
        return len(self.returns)


@dataclass(frozen=True)
class SplitSeries:
    """Chronological train/test partition of a price or return series."""

    train: "PriceSeries | ReturnSeries"
    test: "PriceSeries | ReturnSeries"
    split_fraction: float


def load_prices(path, ticker: str, frequency: Frequency) -> PriceSeries:
    """Load and validate a ``date,close`` CSV, returning a sorted PriceSeries.

    Errors name the offending 1-based line number: MalformedRow for a bad
    header, field count or close value, UnparseableDate for a bad date,
    DuplicateDate for a repeated date, EmptyFile when no data rows exist.
    """
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)

    if not rows:
        raise EmptyFile(f"{path}: file is empty", line=1)
    header = [cell.strip() for cell in rows[0]]
    if header != ["date", "close"]:
        raise MalformedRow(f"{path}: header must be exactly 'date,close'", line=1)
    if len(rows) == 1:
        raise EmptyFile(f"{path}: no data rows", line=1)

    seen: dict[Date, int] = {}
    observations: list[tuple[Date, float]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise MalformedRow(f"{path}: expected 2 fields, got {len(row)}", line=lineno)
        raw_date, raw_close = row[0].strip(), row[1].strip()
        try:
            d = Date.fromisoformat(raw_date)
        except ValueError:
            raise UnparseableDate(f"{path}: bad date {raw_date!r}", line=lineno) from None
        try:
            close = float(raw_close)
        except ValueError:
            raise MalformedRow(f"{path}: non-numeric close {raw_close!r}", line=lineno) from None
        if not math.isfinite(close) or close <= 0.0:
            raise MalformedRow(f"{path}: non-positive close {raw_close!r}", line=lineno)
        if d in seen:
            raise DuplicateDate(
                f"{path}: date {d} already seen on line {seen[d]}", line=lineno
            )
        seen[d] = lineno
        observations.append((d, close))

    observations.sort(key=lambda obs: obs[0])
    return PriceSeries(ticker=ticker, frequency=frequency, observations=tuple(observations))


def log_returns(prices: PriceSeries) -> ReturnSeries:
    """Per-step log returns ln(p[i+1] / p[i]); length is len(prices) - 1."""
    closes = prices.closes
    if len(closes) < 2:
        raise SeriesTooShort(f"{prices.ticker}: need at least 2 prices for returns")
    rets = tuple(
        math.log(closes[i + 1] / closes[i]) for i in range(len(closes) - 1)
    )
    return ReturnSeries(
        ticker=prices.ticker,
        frequency=prices.frequency,
        returns=rets,
        dt_years=prices.frequency.dt_years,
    )


def split(series: PriceSeries | ReturnSeries, fraction: float) -> SplitSeries:
    """Chronological prefix/suffix split with train length floor(fraction * n).

    The remainder goes to the test side.  Raises DegenerateSplit when either
    side would be empty, or when a price-series side would be too short to
    stand on its own (prices need two observations to yield a return).
    """
    if not (0.0 < fraction < 1.0):
        raise DomainError(f"split fraction must be in (0, 1), got {fraction}")
    n = len(series)
    m = math.floor(fraction * n)
    if m < 1 or n - m < 1:
        raise DegenerateSplit(
            f"{series.ticker}: fraction {fraction} on {n} observations leaves an empty side"
        )
    if isinstance(series, PriceSeries):
        if m < 2 or n - m < 2:
            raise DegenerateSplit(
                f"{series.ticker}: price split needs >= 2 observations per side, "
                f"got {m} train / {n - m} test"
            )
        train = replace(series, observations=series.observations[:m])
        test = replace(series, observations=series.observations[m:])
    else:
        train = replace(series, returns=series.returns[:m])
        test = replace(series, returns=series.returns[m:])
    return SplitSeries(train=train, test=test, split_fraction=fraction)


def reconstruct_prices(p0: float, returns: ReturnSeries) -> tuple[float, ...]:
    """Invert log returns: price[i] = p0 * exp(sum of the first i+1 returns).

    Round-trips log_returns up to floating-point tolerance.
    """
    if not (p0 > 0.0 and math.isfinite(p0)):
        raise DomainError(f"p0 must be a positive real, got {p0}")
    prices = []
    acc = 0.0
    for r in returns.returns:
        acc += r
        prices.append(p0 * math.exp(acc))
    return tuple(prices)
