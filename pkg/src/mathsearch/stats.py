"""Mean and Student-t confidence half-width for benchmark pass times.

The t quantile is computed from the regularized incomplete beta function
(continued-fraction evaluation, bisection inverse) rather than a lookup
table, so any sample count works.
"""

from __future__ import annotations

import math
from typing import Sequence

__all__ = ["InsufficientSamples", "mean_ci", "student_t_ppf", "student_t_cdf"]


class InsufficientSamples(ValueError):
    """A confidence interval needs at least two samples."""


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    max_iter = 300
    eps = 3e-16
    fpmin = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def _reg_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


def student_t_cdf(t: float, df: float) -> float:
    if df <= 0:
        raise ValueError("df must be positive")
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    p = 0.5 * _reg_incomplete_beta(0.5 * df, 0.5, x)
    return 1.0 - p if t > 0 else p


def student_t_ppf(p: float, df: float) -> float:
    """Quantile of the Student-t distribution, by bisection on the CDF."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    if df <= 0:
        raise ValueError("df must be positive")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -student_t_ppf(1.0 - p, df)
    hi = 1.0
    while student_t_cdf(hi, df) < p:
        hi *= 2.0
        if hi > 1e12:
            raise ArithmeticError("t quantile out of range")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def mean_ci(samples: Sequence[float], confidence: float) -> tuple[float, float]:
    """Arithmetic mean and t-based confidence half-width of the samples.

    half-width = t_{(1+confidence)/2, R-1} * s / sqrt(R), with s the sample
    standard deviation (R-1 denominator).
    """
    r = len(samples)
    if r < 2:
        raise InsufficientSamples("need at least two samples")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    mean = math.fsum(samples) / r
    var = math.fsum((x - mean) ** 2 for x in samples) / (r - 1)
    s = math.sqrt(var)
    if s == 0.0:
        return mean, 0.0
    t = student_t_ppf(0.5 * (1.0 + confidence), r - 1)
    return mean, t * s / math.sqrt(r)
