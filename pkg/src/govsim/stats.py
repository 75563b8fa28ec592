"""Descriptive summaries, Welch's t-test, Cohen's d, effect labels and significance stars.

The two-sided p-value comes from the regularized incomplete beta function,
evaluated with Lentz's continued fraction. No external numerics library is
needed at runtime.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

Z95 = 1.96
_EPS = 1e-12
_TINY = 1e-300
_MAX_ITER = 10_000


class DegenerateTestError(ValueError):
    """Both samples have zero variance, so the test statistic is undefined."""


@dataclass(frozen=True)
class SampleSummary:
    n: int
    mean: float
    sd: float
    ci95_half: float


@dataclass(frozen=True)
class TestResult:
    t: float
    df: float
    p: float
    d: float
    label: str
    stars: str

    __test__ = False  # keep pytest from collecting this as a test class


def _mean_var(xs: Sequence[float]) -> tuple[int, float, float]:
    n = len(xs)
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    m = math.fsum(xs) / n
    var = math.fsum((x - m) ** 2 for x in xs) / (n - 1)
    return n, m, var


def summarize(samples: Sequence[float]) -> SampleSummary:
    n, m, var = _mean_var(samples)
    sd = math.sqrt(var)
    return SampleSummary(n, m, sd, Z95 * sd / math.sqrt(n))


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    # use the expansion that converges fastest, flipping via symmetry
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: float) -> float:
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isinf(t):
        return 0.0
    p = betainc(df / 2.0, 0.5, df / (df + t * t))
    return min(1.0, max(0.0, p))


def welch_t_test(a: Sequence[float], b: Sequence[float]) -> tuple[float, float, float]:
    """Welch's unequal-variance t-test; returns (t, df, two-sided p)."""
    na, ma, va = _mean_var(a)
    nb, mb, vb = _mean_var(b)
    sa, sb = va / na, vb / nb
    se2 = sa + sb
    if se2 == 0.0:
        raise DegenerateTestError("both samples have zero variance")
    t = (ma - mb) / math.sqrt(se2)
    # normalise the variance shares first so tiny variances cannot underflow
    ra, rb = sa / se2, sb / se2
    df = 1.0 / (ra * ra / (na - 1) + rb * rb / (nb - 1))
    return t, df, t_two_sided_p(t, df)


def cohens_d(a: Sequence[float], b: Sequence[float]) -> float:
    na, ma, va = _mean_var(a)
    nb, mb, vb = _mean_var(b)
    pooled = math.sqrt(((na - 1) * va + (nb - 1) * vb) / (na + nb - 2))
    if pooled == 0.0:
        raise DegenerateTestError("pooled standard deviation is zero")
    return (ma - mb) / pooled


_LABELS = ((0.2, "Negligible"), (0.5, "Small"), (0.8, "Medium"), (4.0, "Large"))


def effect_label(d: float) -> str:
    size = abs(d)
    for bound, label in _LABELS:
        if size < bound:
            return label
    return "Very Large"


def sig_stars(p: float) -> str:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return "ns"


def compare(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Full two-sample comparison as reported in pairwise tables."""
    t, df, p = welch_t_test(a, b)
    d = cohens_d(a, b)
    return TestResult(t, df, p, d, effect_label(d), sig_stars(p))
