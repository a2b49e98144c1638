"""Paired Student-t significance testing in pure Python.

The two-sided p-value comes from the regularized incomplete beta function
evaluated with the standard continued fraction (modified Lentz scheme):
p = I_x(df/2, 1/2) with x = df / (df + t^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

_MAX_ITERATIONS = 300
_EPS = 1e-15
_FPMIN = 1e-300


def _beta_continued_fraction(x: float, a: float, b: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITERATIONS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge for "
        f"x={x}, a={a}, b={b}"
    )


def _incomplete_beta(a: float, b: float, x: float, xc: float) -> float:
    """I_x(a, b) with the complement xc = 1 - x supplied exactly.

    Taking xc as a separate argument avoids cancellation when x is within a
    few ulps of 1, which happens for t statistics very close to zero.
    """
    if x == 0.0:
        return 0.0
    if xc == 0.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(xc)
    )
    front = math.exp(ln_front)
    # The continued fraction converges fast only for x below the split point;
    # otherwise evaluate the mirrored integral.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(x, a, b) / a
    return 1.0 - front * _beta_continued_fraction(xc, b, a) / b


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    return _incomplete_beta(a, b, x, 1.0 - x)


def student_t_two_sided_p(t: float, df: int) -> float:
    """P(|T| >= |t|) for T Student-t distributed with df degrees of freedom."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if math.isnan(t):
        raise ValueError("t statistic is NaN")
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    tt = t * t
    x = df / (df + tt)
    return _incomplete_beta(df / 2.0, 0.5, x, tt / (df + tt))


@dataclass(frozen=True)
class PairedTResult:
    t: float
    df: int
    p_value: float
    mean_diff: float


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> PairedTResult:
    """Two-sided paired t-test on matched samples.

    Degenerate inputs are resolved without dividing by zero: when every
    difference is identical, the test reports p = 1.0 for a zero mean (no
    effect at all) and p = 0.0 otherwise (a deterministic shift).
    """
    if len(a) != len(b):
        raise ValueError(f"sample lengths differ: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        raise ValueError(f"need at least 2 paired observations, got {n}")
    diffs = [float(x) - float(y) for x, y in zip(a, b)]
    df = n - 1
    if all(d == diffs[0] for d in diffs):
        # Checking the differences themselves, not the computed variance:
        # rounding in the mean can leave identical diffs with a nonzero
        # variance, which would turn into a meaningless astronomical t.
        if diffs[0] == 0.0:
            return PairedTResult(t=0.0, df=df, p_value=1.0, mean_diff=0.0)
        t = math.inf if diffs[0] > 0 else -math.inf
        return PairedTResult(t=t, df=df, p_value=0.0, mean_diff=diffs[0])
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    sd = math.sqrt(var)
    if sd == 0.0:
        if mean == 0.0:
            return PairedTResult(t=0.0, df=df, p_value=1.0, mean_diff=mean)
        t = math.inf if mean > 0 else -math.inf
        return PairedTResult(t=t, df=df, p_value=0.0, mean_diff=mean)
    t = mean / (sd / math.sqrt(n))
    return PairedTResult(
        t=t, df=df, p_value=student_t_two_sided_p(t, df), mean_diff=mean
    )
