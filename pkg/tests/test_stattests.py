import math

import numpy as np
import pytest

from gbmdesk import (
    SeriesTooLong,
    SeriesTooShort,
    ZeroVariance,
    adf_test,
    assemble_report,
    hurst_exponent,
    ljung_box,
    run_battery,
    shapiro_wilk,
)
from gbmdesk.stattests import TestResult, dickey_fuller_pvalue
from helpers import philox, return_series
from reference_data import GCB_ADF, GCB_HURST, GCB_LJUNG_BOX, GCB_SHAPIRO
from reference_royston import swilk_reference


# ---------------------------------------------------------------------------
# ADF
# ---------------------------------------------------------------------------

def test_df_pvalue_weekly_reference_statistic():
    # weekly statistic at a weekly-sized regression sample
    stat, expected_p = GCB_ADF["weekly"]
    p, clamped = dickey_fuller_pvalue(stat, 253)
    assert abs(p - expected_p) < 0.005
    assert not clamped


def test_df_pvalue_clamps_extremes():
    p, clamped = dickey_fuller_pvalue(-10.0, 100)
    assert p == 0.01 and clamped
    p, clamped = dickey_fuller_pvalue(5.0, 100)
    assert p == 0.99 and clamped


def test_df_pvalue_monotone_in_statistic():
    stats = np.linspace(-5.0, 1.0, 61)
    values = [dickey_fuller_pvalue(float(s), 200)[0] for s in stats]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_adf_lag_order_and_detail():
    x = philox(40).normal(size=100)
    result = adf_test(return_series(x))
    assert result.detail["lag_order"] == math.floor(99 ** (1.0 / 3.0))
    assert result.detail["nobs"] == 100 - 1 - result.detail["lag_order"]
    assert 0.01 <= result.p_value <= 0.99


def test_adf_too_short():
    with pytest.raises(SeriesTooShort):
        adf_test(return_series([0.01] * 7))


def test_adf_random_walk_size_100_seeds():
    # unit-root null true: the test should rarely reject
    kept = 0
    for seed in range(100):
        walk = philox(7000 + seed).normal(size=200).cumsum()
        if adf_test(walk).p_value > 0.05:
            kept += 1
    assert kept >= 95


def test_adf_white_noise_power_100_seeds():
    # stationary alternative: the test should nearly always reject
    rejected = 0
    for seed in range(100):
        noise = philox(8000 + seed).normal(size=200)
        if adf_test(noise).p_value <= 0.05:
            rejected += 1
    assert rejected >= 95


# ---------------------------------------------------------------------------
# Shapiro-Wilk
# ---------------------------------------------------------------------------

def test_shapiro_affine_invariance():
    x = philox(12).normal(size=40)
    base = shapiro_wilk(x)
    shifted = shapiro_wilk(3.0 * x + 11.0)
    assert abs(base.statistic - shifted.statistic) < 1e-10


def test_shapiro_matches_reference_on_normal_sample():
    x = philox(30).normal(size=30)
    ours = shapiro_wilk(x)
    w_ref, p_ref = swilk_reference(x)
    assert abs(ours.statistic - w_ref) < 1e-6
    assert abs(ours.p_value - p_ref) < 1e-6


def test_shapiro_rejects_heavy_tails():
    x = philox(3).standard_t(2, size=30)
    ours = shapiro_wilk(x)
    w_ref, p_ref = swilk_reference(x)
    assert ours.p_value < 0.05
    assert abs(ours.p_value - p_ref) < 1e-6


def test_shapiro_w_bounded():
    for seed in range(10):
        x = philox(600 + seed).normal(size=25)
        result = shapiro_wilk(x)
        assert 0.0 < result.statistic <= 1.0
        assert 0.0 <= result.p_value <= 1.0


def test_shapiro_range_checks():
    with pytest.raises(SeriesTooShort):
        shapiro_wilk(np.arange(7.0))
    with pytest.raises(SeriesTooLong):
        shapiro_wilk(philox(1).normal(size=5001))
    with pytest.raises(ZeroVariance):
        shapiro_wilk(np.full(20, 1.25))


# ---------------------------------------------------------------------------
# Ljung-Box
# ---------------------------------------------------------------------------

def test_ljung_box_matches_direct_formula():
    x = philox(77).normal(size=60)
    result = ljung_box(x, lags=3)
    n = x.size
    centered = x - x.mean()
    denom = centered @ centered
    q = 0.0
    for k in range(1, 4):
        rho = (centered[k:] @ centered[:-k]) / denom
        q += rho * rho / (n - k)
    q *= n * (n + 2)
    assert abs(result.statistic - q) < 1e-12
    assert result.detail["lags"] == 3


def test_ljung_box_alternating_series():
    x = np.array([1.0 if i % 2 == 0 else -1.0 for i in range(50)])
    result = ljung_box(x, lags=1)
    assert result.detail["autocorrelations"][0] < -0.9
    assert result.statistic > 40.0
    assert result.p_value < 1e-6


def test_ljung_box_affine_invariance():
    x = philox(13).normal(size=80)
    base = ljung_box(x)
    transformed = ljung_box(-2.5 * x + 0.3)
    assert abs(base.statistic - transformed.statistic) < 1e-9


def test_ljung_box_guards():
    with pytest.raises(SeriesTooShort):
        ljung_box(np.array([0.1, 0.2]), lags=1)
    with pytest.raises(ZeroVariance):
        ljung_box(np.zeros(30), lags=1)


# ---------------------------------------------------------------------------
# Hurst exponent
# ---------------------------------------------------------------------------

def test_hurst_white_noise_band():
    estimates = [
        hurst_exponent(philox(9000 + seed).normal(size=1024)).statistic
        for seed in range(100)
    ]
    assert 0.42 <= float(np.mean(estimates)) <= 0.58


def test_hurst_persistent_ramp():
    ramp = np.arange(1024, dtype=float) + philox(4).normal(0.0, 0.5, size=1024)
    assert hurst_exponent(ramp).statistic > 0.9


def test_hurst_scale_invariance():
    x = philox(15).normal(size=256)
    base = hurst_exponent(x)
    scaled = hurst_exponent(4.0 * x + 2.0)
    assert abs(base.statistic - scaled.statistic) < 1e-8


def test_hurst_detail_points():
    x = philox(16).normal(size=256)
    result = hurst_exponent(x)
    assert result.p_value is None
    assert result.detail["window_sizes"] == [8, 16, 32, 64, 128]
    assert len(result.detail["points"]) == 5
    ln_w, ln_rs = zip(*result.detail["points"])
    assert list(ln_w) == [math.log(w) for w in (8, 16, 32, 64, 128)]
    assert all(math.isfinite(v) for v in ln_rs)


def test_hurst_guards():
    with pytest.raises(SeriesTooShort):
        hurst_exponent(np.zeros(31))
    with pytest.raises(ZeroVariance):
        hurst_exponent(np.zeros(64))


# ---------------------------------------------------------------------------
# Battery and verdict logic
# ---------------------------------------------------------------------------

def _result(statistic, p_value=None):
    return TestResult(statistic=statistic, p_value=p_value, detail={})


def test_verdicts_monthly_reference_statistics():
    report = assemble_report(
        adf=_result(*GCB_ADF["monthly"]),
        sw=_result(*GCB_SHAPIRO["monthly"]),
        lb=_result(*GCB_LJUNG_BOX["monthly"]),
        hurst=_result(GCB_HURST["monthly"]),
        alpha=0.05,
        hurst_band=0.1,
    )
    assert report.stationary and report.normal and report.independent and report.random_walk
    assert report.gbm_suitable


def test_verdicts_weekly_reference_statistics():
    report = assemble_report(
        adf=_result(*GCB_ADF["weekly"]),
        sw=_result(*GCB_SHAPIRO["weekly"]),
        lb=_result(*GCB_LJUNG_BOX["weekly"]),
        hurst=_result(GCB_HURST["weekly"]),
        alpha=0.05,
        hurst_band=0.1,
    )
    assert not report.normal
    assert not report.gbm_suitable
    # the default band still calls H = 0.554 a random walk; a tighter band does not
    assert report.random_walk
    tighter = assemble_report(
        adf=_result(*GCB_ADF["weekly"]),
        sw=_result(*GCB_SHAPIRO["weekly"]),
        lb=_result(*GCB_LJUNG_BOX["weekly"]),
        hurst=_result(GCB_HURST["weekly"]),
        alpha=0.05,
        hurst_band=0.05,
    )
    assert not tighter.random_walk


def test_verdict_threshold_edges():
    report = assemble_report(
        adf=_result(-3.0, 0.05),       # p == alpha is not a rejection
        sw=_result(0.95, 0.05),        # p == alpha passes normality
        lb=_result(1.0, 0.05),
        hurst=_result(0.6),            # |H - 0.5| == band is inside
        alpha=0.05,
        hurst_band=0.1,
    )
    assert not report.stationary
    assert report.normal and report.independent and report.random_walk


def test_gbm_suitable_iff_all_four_verdicts():
    # exercise every pass/fail combination of the four verdicts
    passing = {
        "adf": _result(-4.0, 0.01),
        "sw": _result(0.97, 0.5),
        "lb": _result(1.0, 0.5),
        "hurst": _result(0.5),
    }
    failing = {
        "adf": _result(-1.0, 0.6),
        "sw": _result(0.8, 0.001),
        "lb": _result(9.0, 0.002),
        "hurst": _result(0.9),
    }
    names = ("adf", "sw", "lb", "hurst")
    for mask in range(16):
        chosen = {
            name: (passing if mask & (1 << i) else failing)[name]
            for i, name in enumerate(names)
        }
        report = assemble_report(**chosen)
        verdicts = (report.stationary, report.normal, report.independent, report.random_walk)
        assert report.gbm_suitable == all(verdicts)
        assert report.gbm_suitable == (mask == 15)


def test_hurst_skips_degenerate_windows():
    # a flat head only knocks out the windows it covers
    x = np.concatenate([np.zeros(8), philox(44).normal(size=120)])
    result = hurst_exponent(x)
    assert math.isfinite(result.statistic)
    assert 8 in result.detail["window_sizes"]


def test_verdicts_fail_for_skipped_tests():
    report = assemble_report(
        adf=_result(math.nan, None),
        sw=_result(math.nan, None),
        lb=_result(math.nan, None),
        hurst=_result(math.nan, None),
    )
    assert not (report.stationary or report.normal or report.independent or report.random_walk)
    assert not report.gbm_suitable


def test_run_battery_all_zero_returns():
    report = run_battery(return_series([0.0] * 64))
    assert report.shapiro_wilk.detail.get("skipped")
    assert "ZeroVariance" in report.shapiro_wilk.detail["error"]
    assert "ZeroVariance" in report.ljung_box.detail["error"]
    assert not report.gbm_suitable


def test_run_battery_on_passing_series():
    rets = philox(3).normal(0.004165, 0.0764, size=239)
    report = run_battery(return_series(rets))
    assert report.gbm_suitable
    assert report.adf.p_value < 0.05
    assert report.shapiro_wilk.p_value >= 0.05
    assert report.ljung_box.p_value >= 0.05
    assert abs(report.hurst.statistic - 0.5) <= 0.1


def test_every_emitted_pvalue_in_unit_interval():
    for seed in range(25):
        x = philox(1300 + seed).normal(size=128)
        for result in (adf_test(x), shapiro_wilk(x), ljung_box(x)):
            assert 0.0 <= result.p_value <= 1.0


def test_calibration_small_monte_carlo():
    # smaller twin of the acceptance calibration: each test under its null
    n, seeds = 256, 200
    rejections = {"adf": 0, "sw": 0, "lb": 0}
    for seed in range(seeds):
        noise = philox(20000 + seed).normal(size=n)
        if adf_test(noise.cumsum()).p_value < 0.05:
            rejections["adf"] += 1
        if shapiro_wilk(noise).p_value < 0.05:
            rejections["sw"] += 1
        if ljung_box(noise).p_value < 0.05:
            rejections["lb"] += 1
    for name, count in rejections.items():
        assert 0.01 <= count / seeds <= 0.09, (name, count)
