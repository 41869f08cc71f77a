"""The four-part assumption battery for GBM modeling of a return series.

A return series qualifies for GBM fitting when it is stationary (augmented
Dickey-Fuller with constant and trend), normally distributed (Shapiro-Wilk,
Royston's 1995 approximation), serially independent (Ljung-Box portmanteau)
and behaves like a random walk (rescaled-range Hurst exponent near 0.5).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DomainError,
    GbmDeskError,
    SeriesTooLong,
    SeriesTooShort,
    ZeroVariance,
)
from .ingest import ReturnSeries
from .specfun import chi_square_survival, normal_cdf, normal_quantile, ols

DEFAULT_ALPHA = 0.05
DEFAULT_HURST_BAND = 0.1


@dataclass(frozen=True)
class TestResult:
    """One test's statistic, p-value (None where the test has none) and extras."""

    __test__ = False  # domain type, not a pytest class

    statistic: float
    p_value: float | None
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AssumptionReport:
    """Battery outcome: per-test results, verdicts and the combined gate flag."""

    adf: TestResult
    shapiro_wilk: TestResult
    ljung_box: TestResult
    hurst: TestResult
    stationary: bool
    normal: bool
    independent: bool
    random_walk: bool
    alpha: float
    hurst_band: float

    @property
    def gbm_suitable(self) -> bool:
        return self.stationary and self.normal and self.independent and self.random_walk


def _values(series) -> np.ndarray:
    if isinstance(series, ReturnSeries):
        return np.asarray(series.returns, dtype=float)
    return np.asarray(series, dtype=float)


# ---------------------------------------------------------------------------
# Augmented Dickey-Fuller, constant + trend
# ---------------------------------------------------------------------------

# Dickey-Fuller percentiles of the t-statistic for the constant-and-trend
# regression, by effective sample size.  Rows are the tail probabilities,
# columns the sample sizes; p-values interpolate linearly in both directions
# and clamp at the table edges.
_DF_PROBS = np.array([0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99])
_DF_SIZES = np.array([25.0, 50.0, 100.0, 250.0, 500.0, 1.0e5])
_DF_TABLE = -np.array(
    [
        [4.38, 4.15, 4.04, 3.99, 3.98, 3.96],
        [3.95, 3.80, 3.73, 3.69, 3.68, 3.66],
        [3.60, 3.50, 3.45, 3.43, 3.42, 3.41],
        [3.24, 3.18, 3.15, 3.13, 3.13, 3.12],
        [1.14, 1.19, 1.22, 1.23, 1.24, 1.25],
        [0.80, 0.87, 0.90, 0.92, 0.93, 0.94],
        [0.50, 0.58, 0.62, 0.64, 0.65, 0.66],
        [0.15, 0.24, 0.28, 0.31, 0.32, 0.33],
    ]
)


def dickey_fuller_pvalue(statistic: float, nobs: int) -> tuple[float, bool]:
    """Interpolated p-value for the trend-case Dickey-Fuller distribution.

    Returns (p, clamped); p is clamped to [0.01, 0.99] outside the table.
    """
    crits = np.array([np.interp(nobs, _DF_SIZES, _DF_TABLE[i]) for i in range(len(_DF_PROBS))])
    clamped = bool(statistic < crits[0] or statistic > crits[-1])
    p = float(np.interp(statistic, crits, _DF_PROBS))
    return min(max(p, 0.01), 0.99), clamped


def adf_test(returns: ReturnSeries | np.ndarray) -> TestResult:
    """Augmented Dickey-Fuller unit-root test with constant and trend.

    Regresses dy_t on (1, t, y_{t-1}, dy_{t-1} ... dy_{t-L}) with the lag
    order L = floor((n - 1)^(1/3)); the statistic is the t-ratio of the
    y_{t-1} coefficient and the p-value comes from table interpolation.
    A p-value below alpha rejects the unit root, i.e. supports stationarity.
    """
    y = _values(returns)
    n = y.size
    if n < 8:
        raise SeriesTooShort(f"adf_test needs >= 8 observations, got {n}")
    lag = int(math.floor((n - 1) ** (1.0 / 3.0)))
    dy = np.diff(y)
    rows = n - 1 - lag
    ncols = 3 + lag
    if rows <= ncols:
        raise SeriesTooShort(f"adf_test: {n} observations leave no degrees of freedom")
    design = np.empty((rows, ncols))
    design[:, 0] = 1.0
    design[:, 1] = np.arange(1, rows + 1, dtype=float)
    design[:, 2] = y[lag : n - 1]
    for i in range(1, lag + 1):
        design[:, 2 + i] = dy[lag - i : n - 1 - i]
    fit = ols(dy[lag:], design)
    stat = float(fit.coefficients[2] / fit.standard_errors[2])
    p, clamped = dickey_fuller_pvalue(stat, rows)
    return TestResult(
        statistic=stat,
        p_value=p,
        detail={"lag_order": lag, "nobs": rows, "clamped": clamped},
    )


# ---------------------------------------------------------------------------
# Shapiro-Wilk, Royston 1995 approximation
# ---------------------------------------------------------------------------

def shapiro_wilk(returns: ReturnSeries | np.ndarray) -> TestResult:
    """Shapiro-Wilk normality test for 8 <= n <= 5000 samples.

    W is the squared correlation between the ordered sample and optimal
    normal scores; the p-value transforms W to an approximately standard
    normal deviate (log scale, sample-size dependent moments) and takes the
    upper tail.  Small W / small p reject normality.
    """
    x = np.sort(_values(returns))
    n = x.size
    if n < 8:
        raise SeriesTooShort(f"shapiro_wilk needs >= 8 observations, got {n}")
    if n > 5000:
        raise SeriesTooLong(f"shapiro_wilk is valid up to 5000 observations, got {n}")
    if x[-1] - x[0] <= 0.0:
        raise ZeroVariance("shapiro_wilk: all values identical")

    m = np.array([normal_quantile((i - 0.375) / (n + 0.25)) for i in range(1, n + 1)])
    msq = float(m @ m)
    u = 1.0 / math.sqrt(n)
    a_n = _poly_royston((-2.706056, 4.434685, -2.071190, -0.147981, 0.221157), u) + m[-1] / math.sqrt(msq)
    a_n1 = _poly_royston((-3.582633, 5.682633, -1.752461, -0.293762, 0.042981), u) + m[-2] / math.sqrt(msq)
    phi = (msq - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (1.0 - 2.0 * a_n**2 - 2.0 * a_n1**2)
    a = m / math.sqrt(phi)
    a[-1], a[-2] = a_n, a_n1
    a[0], a[1] = -a_n, -a_n1

    centered = x - x.mean()
    w = float((a @ x) ** 2 / (centered @ centered))
    w = min(w, 1.0)

    if n <= 11:
        gamma = 0.459 * n - 2.273
        arg = gamma - math.log(1.0 - w) if w < 1.0 else math.inf
        if arg <= 0.0:
            return TestResult(statistic=w, p_value=0.0, detail={"n": n})
        y = -math.log(arg)
        mu = 0.5440 - 0.39978 * n + 0.025054 * n**2 - 0.0006714 * n**3
        sigma = math.exp(1.3822 - 0.77857 * n + 0.062767 * n**2 - 0.0020322 * n**3)
    else:
        if w >= 1.0:
            return TestResult(statistic=1.0, p_value=1.0, detail={"n": n})
        ln_n = math.log(n)
        y = math.log(1.0 - w)
        mu = -1.5861 - 0.31082 * ln_n - 0.083751 * ln_n**2 + 0.0038915 * ln_n**3
        sigma = math.exp(-0.4803 - 0.082676 * ln_n + 0.0030302 * ln_n**2)
    z = (y - mu) / sigma
    p = min(max(1.0 - normal_cdf(z), 0.0), 1.0)
    return TestResult(statistic=w, p_value=p, detail={"n": n})


def _poly_royston(coeffs_desc, u):
    # coefficients for u^5 .. u^1, no constant term
    acc = 0.0
    for c in coeffs_desc:
        acc = (acc + c) * u
    return acc


# ---------------------------------------------------------------------------
# Ljung-Box portmanteau
# ---------------------------------------------------------------------------

def ljung_box(returns: ReturnSeries | np.ndarray, lags: int = 1) -> TestResult:
    """Ljung-Box test of zero autocorrelation up to the given lag.

    Q = n (n + 2) sum_k rho_k^2 / (n - k) against a chi-square with `lags`
    degrees of freedom.  Large Q / small p reject independence.
    """
    if lags < 1:
        raise DomainError(f"ljung_box needs lags >= 1, got {lags}")
    x = _values(returns)
    n = x.size
    if n <= lags + 1:
        raise SeriesTooShort(f"ljung_box needs n > lags + 1, got n={n}, lags={lags}")
    centered = x - x.mean()
    denom = float(centered @ centered)
    if denom <= 0.0:
        raise ZeroVariance("ljung_box: all values identical")
    autocorr = []
    q = 0.0
    for k in range(1, lags + 1):
        rho = float(centered[k:] @ centered[:-k]) / denom
        autocorr.append(rho)
        q += rho * rho / (n - k)
    q *= n * (n + 2.0)
    p = chi_square_survival(q, lags)
    return TestResult(statistic=q, p_value=p, detail={"lags": lags, "autocorrelations": autocorr})


# ---------------------------------------------------------------------------
# Hurst exponent, rescaled-range analysis
# ---------------------------------------------------------------------------

def hurst_exponent(returns: ReturnSeries | np.ndarray) -> TestResult:
    """Rescaled-range Hurst exponent estimate.

    For window sizes w = 8, 16, 32, ... up to n // 2, the series is cut
    into non-overlapping windows.  Per window, R is the range of the
    cumulative mean-adjusted sums and S the population standard deviation;
    zero-variance windows are skipped.  H is the slope of the regression of
    ln(mean R/S) on ln(w).  H near 0.5 indicates a random walk, above 0.5
    persistence, below 0.5 anti-persistence.  No p-value is defined.
    """
    x = _values(returns)
    n = x.size
    if n < 32:
        raise SeriesTooShort(f"hurst_exponent needs >= 32 observations, got {n}")
    log_w = []
    log_rs = []
    window_sizes = []
    w = 8
    while w <= n // 2:
        ratios = []
        for start in range(0, (n // w) * w, w):
            seg = x[start : start + w]
            s = float(seg.std())
            if s <= 0.0:
                continue
            z = np.cumsum(seg - seg.mean())
            ratios.append(float(z.max() - z.min()) / s)
        if ratios:
            window_sizes.append(w)
            log_w.append(math.log(w))
            log_rs.append(math.log(sum(ratios) / len(ratios)))
        w *= 2
    if len(log_w) < 2:
        raise ZeroVariance("hurst_exponent: not enough non-degenerate windows")
    design = np.column_stack([np.ones(len(log_w)), log_w])
    fit = ols(np.array(log_rs), design)
    h = float(fit.coefficients[1])
    points = [[lw, lr] for lw, lr in zip(log_w, log_rs)]
    return TestResult(
        statistic=h,
        p_value=None,
        detail={"window_sizes": window_sizes, "points": points},
    )


# ---------------------------------------------------------------------------
# Battery
# ---------------------------------------------------------------------------

def assemble_report(
    adf: TestResult,
    sw: TestResult,
    lb: TestResult,
    hurst: TestResult,
    alpha: float = DEFAULT_ALPHA,
    hurst_band: float = DEFAULT_HURST_BAND,
) -> AssumptionReport:
    """Apply the verdict thresholds to already-computed test results.

    Stationarity requires rejecting the unit root (p < alpha); normality and
    independence require failing to reject (p >= alpha); the random-walk
    verdict requires |H - 0.5| <= hurst_band.  A test that could not run
    (p-value None / NaN statistic) fails its verdict.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if not (hurst_band > 0.0):
        raise DomainError(f"hurst_band must be positive, got {hurst_band}")
    stationary = adf.p_value is not None and adf.p_value < alpha
    normal = sw.p_value is not None and sw.p_value >= alpha
    independent = lb.p_value is not None and lb.p_value >= alpha
    random_walk = math.isfinite(hurst.statistic) and abs(hurst.statistic - 0.5) <= hurst_band
    return AssumptionReport(
        adf=adf,
        shapiro_wilk=sw,
        ljung_box=lb,
        hurst=hurst,
        stationary=stationary,
        normal=normal,
        independent=independent,
        random_walk=random_walk,
        alpha=alpha,
        hurst_band=hurst_band,
    )


def _run_or_skip(fn, series) -> TestResult:
    try:
        return fn(series)
    except GbmDeskError as exc:
        return TestResult(
            statistic=math.nan,
            p_value=None,
            detail={"skipped": True, "error": f"{type(exc).__name__}: {exc}"},
        )


def run_battery(
    returns: ReturnSeries,
    alpha: float = DEFAULT_ALPHA,
    hurst_band: float = DEFAULT_HURST_BAND,
) -> AssumptionReport:
    """Run all four tests and combine their verdicts.

    Per-test failures (too short, zero variance, ...) are recorded in the
    result's detail and fail the corresponding verdict instead of raising.
    """
    adf = _run_or_skip(adf_test, returns)
    sw = _run_or_skip(shapiro_wilk, returns)
    lb = _run_or_skip(ljung_box, returns)
    hurst = _run_or_skip(hurst_exponent, returns)
    return assemble_report(adf, sw, lb, hurst, alpha=alpha, hurst_band=hurst_band)
