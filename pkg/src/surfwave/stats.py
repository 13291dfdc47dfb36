"""Descriptive statistics and the unpaired two-tailed t-test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import special
from scipy import stats as _st

from .errors import InsufficientDataError

ALPHA = 0.05


@dataclass(frozen=True)
class SampleSummary:
    """Mean, unbiased SD, SEM and 95% CI half-width; spread fields are None for n = 1."""

    n: int
    mean: float
    sd: Optional[float]
    sem: Optional[float]
    ci95_halfwidth: Optional[float]

    def interval(self, confidence: float = 0.95) -> tuple:
        if self.n < 2:
            raise InsufficientDataError("a confidence interval needs at least 2 samples")
        half = _st.t.ppf(0.5 + confidence / 2.0, self.n - 1) * self.sem
        return (self.mean - half, self.mean + half)


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_of_freedom: float
    p_value: float
    significant: bool


def describe(samples: Sequence[float]) -> SampleSummary:
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise InsufficientDataError("cannot describe an empty sample")
    mean = float(x.mean())
    if x.size < 2:
        return SampleSummary(1, mean, None, None, None)
    sd = float(x.std(ddof=1))
    sem = sd / math.sqrt(x.size)
    ci = float(_st.t.ppf(0.975, x.size - 1) * sem)
    return SampleSummary(int(x.size), mean, sd, sem, ci)


def student_t_sf2(t: float, df: float) -> float:
    """Two-tailed tail probability P(|T| >= |t|) for Student's t with ``df`` degrees of freedom.

    Uses the identity P(|T| >= t) = I_{df/(df+t^2)}(df/2, 1/2) with the
    regularised incomplete beta function.
    """
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return float(min(1.0, max(0.0, special.betainc(0.5 * df, 0.5, x))))


def t_test_unpaired(a: Sequence[float], b: Sequence[float], *, equal_var: bool = False, alpha: float = ALPHA) -> TTestResult:
    """Unpaired two-tailed t-test; Welch's unequal-variance form unless ``equal_var``.

    Zero variance in both samples: equal means give t = 0, p = 1; unequal
    means give t = +/-inf and p = 0.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = a.size, b.size
    if na < 2 or nb < 2:
        raise InsufficientDataError(f"each sample needs n >= 2 (got {na}, {nb})")
    ma, mb = float(a.mean()), float(b.mean())
    va, vb = float(a.var(ddof=1)), float(b.var(ddof=1))
    if equal_var:
        df = float(na + nb - 2)
        pooled = ((na - 1) * va + (nb - 1) * vb) / df
        se2 = pooled * (1.0 / na + 1.0 / nb)
    else:
        qa, qb = va / na, vb / nb
        se2 = qa + qb
        df = se2 * se2 / (qa * qa / (na - 1) + qb * qb / (nb - 1)) if se2 > 0 else float(na + nb - 2)
    if se2 == 0:
        if ma == mb:
            return TTestResult(0.0, df, 1.0, False)
        t = math.copysign(math.inf, ma - mb)
        return TTestResult(t, df, 0.0, True)
    t = (ma - mb) / math.sqrt(se2)
    p = student_t_sf2(t, df)
    return TTestResult(t, df, p, p < alpha)
