"""Scalar reference implementation of the W normality test.

Straight port of Royston's 1995 half-coefficient formulation (AS R94):
normal scores at the (i - 3/8)/(n + 1/4) plotting positions, polynomial
end-point corrections in 1/sqrt(n), W from the weighted spread of the
ordered sample, and the sample-size dependent log-scale normalization for
the p-value.  Deliberately independent of the package implementation: the
weights live in a 1-based half array and the normal CDF/quantile come from
the standard library.
"""

import math
from statistics import NormalDist

_ND = NormalDist()

# ascending-power polynomial coefficients
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_C3 = (0.5440, -0.39978, 0.025054, -0.0006714)
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_C6 = (-0.4803, -0.082676, 0.0030302)
_G = (-2.273, 0.459)


def _poly(coeffs, x):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def swilk_reference(sample):
    """Return (W, p) for 3 <= n <= 5000 samples with non-zero range."""
    x = sorted(float(v) for v in sample)
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 observations")
    if n > 5000:
        raise ValueError("valid up to 5000 observations")
    if x[-1] - x[0] <= 0.0:
        raise ValueError("zero range")

    nn2 = n // 2
    weights = [0.0] * (nn2 + 1)  # 1-based upper-end weights
    if n == 3:
        weights[1] = math.sqrt(0.5)
    else:
        m = [0.0] * (nn2 + 1)  # lower-half normal scores, all negative
        an25 = n + 0.25
        summ2 = 0.0
        for i in range(1, nn2 + 1):
            m[i] = _ND.inv_cdf((i - 0.375) / an25)
            summ2 += m[i] * m[i]
        summ2 *= 2.0
        ssumm2 = math.sqrt(summ2)
        rsn = 1.0 / math.sqrt(n)
        w1 = _poly(_C1, rsn) - m[1] / ssumm2
        weights[1] = w1
        if n > 5:
            first_plain = 3
            w2 = _poly(_C2, rsn) - m[2] / ssumm2
            fac = math.sqrt(
                (summ2 - 2.0 * m[1] ** 2 - 2.0 * m[2] ** 2)
                / (1.0 - 2.0 * w1 ** 2 - 2.0 * w2 ** 2)
            )
            weights[2] = w2
        else:
            first_plain = 2
            fac = math.sqrt((summ2 - 2.0 * m[1] ** 2) / (1.0 - 2.0 * w1 ** 2))
        for i in range(first_plain, nn2 + 1):
            weights[i] = -m[i] / fac

    mean = sum(x) / n
    ssq = sum((v - mean) ** 2 for v in x)
    spread = 0.0
    for i in range(1, nn2 + 1):
        spread += weights[i] * (x[n - i] - x[i - 1])
    w = spread * spread / ssq
    if w > 1.0:
        w = 1.0

    if n == 3:
        pw = 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return w, min(max(pw, 0.0), 1.0)
    if n <= 11:
        gamma = _poly(_G, n)
        arg = gamma - math.log(1.0 - w) if w < 1.0 else math.inf
        if arg <= 0.0:
            return w, 0.0
        y = -math.log(arg)
        mu = _poly(_C3, n)
        sigma = math.exp(_poly(_C4, n))
    else:
        if w >= 1.0:
            return 1.0, 1.0
        ln_n = math.log(n)
        y = math.log(1.0 - w)
        mu = _poly(_C5, ln_n)
        sigma = math.exp(_poly(_C6, ln_n))
    pw = 1.0 - _ND.cdf((y - mu) / sigma)
    return w, min(max(pw, 0.0), 1.0)
