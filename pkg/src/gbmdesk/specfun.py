"""Scalar special functions and the least-squares kernel behind the test battery.

Everything here is deterministic and stateless.  The normal CDF rides libm's
erfc; its inverse starts from a rational approximation and is polished with a
Halley step against the CDF itself.  Chi-square tail probabilities come from
the regularized incomplete gamma, evaluated by its series expansion below
x = a + 1 and by its continued fraction above (the standard regions of
validity for double precision).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RankDeficient

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

_GAMMA_EPS = 1e-15
_GAMMA_ITMAX = 500


def normal_cdf(x: float) -> float:
    """Standard normal CDF Phi(x), accurate to well below 1e-12 absolute."""
    return 0.5 * math.erfc(-x / _SQRT2)


# Rational approximation coefficients for the inverse normal CDF
# (central region and tails), relative error ~1e-9 before refinement.
_Q_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
        1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_Q_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
        6.680131188771972e+01, -1.328068155288572e+01)
_Q_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
        -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_Q_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
        3.754408661907416e+00)
_Q_PLOW = 0.02425


def normal_quantile(p: float) -> float:
    """Inverse of normal_cdf; |normal_cdf(result) - p| stays below 1e-10.

    Raises DomainError outside the open interval (0, 1).
    """
    if not (0.0 < p < 1.0):
        raise DomainError(f"normal_quantile requires 0 < p < 1, got {p}")
    if p < _Q_PLOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((( _Q_C[0] * q + _Q_C[1]) * q + _Q_C[2]) * q + _Q_C[3]) * q + _Q_C[4]) * q + _Q_C[5]) / \
            (((( _Q_D[0] * q + _Q_D[1]) * q + _Q_D[2]) * q + _Q_D[3]) * q + 1.0)
    elif p <= 1.0 - _Q_PLOW:
        q = p - 0.5
        r = q * q
        x = ((((( _Q_A[0] * r + _Q_A[1]) * r + _Q_A[2]) * r + _Q_A[3]) * r + _Q_A[4]) * r + _Q_A[5]) * q / \
            ((((( _Q_B[0] * r + _Q_B[1]) * r + _Q_B[2]) * r + _Q_B[3]) * r + _Q_B[4]) * r + 1.0)
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -((((( _Q_C[0] * q + _Q_C[1]) * q + _Q_C[2]) * q + _Q_C[3]) * q + _Q_C[4]) * q + _Q_C[5]) / \
            (((( _Q_D[0] * q + _Q_D[1]) * q + _Q_D[2]) * q + _Q_D[3]) * q + 1.0)
    # One Halley step doubles-and-then-some the accurate digits; skip it only
    # where exp(x^2/2) would overflow (far tails, already accurate enough).
    if x * x < 1400.0:
        err = normal_cdf(x) - p
        u = err * _SQRT_2PI * math.exp(0.5 * x * x)
        x -= u / (1.0 + 0.5 * x * u)
    return x


def gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    if a <= 0.0:
        raise DomainError(f"gamma_p requires a > 0, got {a}")
    if x < 0.0:
        raise DomainError(f"gamma_p requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_p_series(a, x)
    return 1.0 - _gamma_q_contfrac(a, x)


def gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0.0:
        raise DomainError(f"gamma_q requires a > 0, got {a}")
    if x < 0.0:
        raise DomainError(f"gamma_q requires x >= 0, got {x}")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_p_series(a, x)
    return _gamma_q_contfrac(a, x)


def _gamma_p_series(a: float, x: float) -> float:
    # sum_k x^k Gamma(a) / Gamma(a+1+k), valid and fast for x < a + 1
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_GAMMA_ITMAX):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_contfrac(a: float, x: float) -> float:
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_ITMAX + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def chi_square_survival(q: float, df: int) -> float:
    """Upper-tail probability P(X >= q) for a chi-square with df degrees."""
    if df < 1:
        raise DomainError(f"chi_square_survival requires df >= 1, got {df}")
    if q < 0.0:
        raise DomainError(f"chi_square_survival requires q >= 0, got {q}")
    return gamma_q(0.5 * df, 0.5 * q)


@dataclass(frozen=True)
class OlsFit:
    """Least-squares fit summary: coefficients, their standard errors, residuals."""

    coefficients: np.ndarray
    standard_errors: np.ndarray
    residuals: np.ndarray
    n: int
    k: int


def ols(y, X) -> OlsFit:
    """Ordinary least squares via QR, with unbiased (n - k) error variance.

    Raises RankDeficient when the design matrix loses full column rank
    (diagonal of R checked against a 1e-12 relative pivot tolerance).
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DomainError("design matrix must be 2-dimensional")
    n, k = X.shape
    if y.shape != (n,):
        raise DomainError(f"y has shape {y.shape}, expected ({n},)")
    if n <= k:
        raise DomainError(f"need more rows than columns, got {n} rows, {k} columns")

    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-12 * max(diag.max(), 1.0):
        raise RankDeficient("design matrix is rank deficient")

    beta = np.linalg.solve(R, Q.T @ y)
    residuals = y - X @ beta
    dof = n - k
    sigma2 = float(residuals @ residuals) / dof
    r_inv = np.linalg.solve(R, np.eye(k))
    cov = sigma2 * (r_inv @ r_inv.T)
    se = np.sqrt(np.diag(cov))
    return OlsFit(coefficients=beta, standard_errors=se, residuals=residuals, n=n, k=k)
