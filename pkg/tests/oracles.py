"""Independent reference computations shared by the unit and acceptance tests."""

import itertools

import mpmath
import numpy as np

from surfwave.stats import t_test_unpaired


def mp_surface_speed(mu1, mu2, rho, f, dps=50):
    """Voigt surface wave speed evaluated in arbitrary precision."""
    with mpmath.workdps(dps):
        mu1, mu2, rho, f = (mpmath.mpf(str(v)) for v in (mu1, mu2, rho, f))
        w = 2 * mpmath.pi * f
        mod = mpmath.sqrt(mu1**2 + (w * mu2) ** 2)
        return mpmath.sqrt(2 * mod**2 / (rho * (mu1 + mod))) / mpmath.mpf("1.05")


def quad_two_tailed(t, df):
    """P(|T| >= |t|) by adaptive quadrature of the Student-t density."""
    with mpmath.workdps(30):
        df = mpmath.mpf(df)
        c = mpmath.gamma((df + 1) / 2) / (mpmath.sqrt(df * mpmath.pi) * mpmath.gamma(df / 2))
        density = lambda x: c * (1 + x * x / df) ** (-(df + 1) / 2)
        return float(2 * mpmath.quad(density, [abs(t), mpmath.inf]))


def permutation_p(a, b):
    """Exact mid-p permutation test on |Welch t| over all relabellings."""
    pool = np.concatenate([a, b])
    n = len(pool)
    t0 = abs(t_test_unpaired(a, b).t_statistic)
    gt = eq = total = 0
    for idx in itertools.combinations(range(n), len(a)):
        rest = [i for i in range(n) if i not in idx]
        t = abs(t_test_unpaired(pool[list(idx)], pool[rest]).t_statistic)
        total += 1
        if t > t0 * (1 + 1e-9):
            gt += 1
        elif t >= t0 * (1 - 1e-9):
            eq += 1
    return (gt + 0.5 * eq) / total


def permutation_differences(n_pairs=100, seed=0):
    """|permutation p - Welch p| over random 3 + 3 sample pairs."""
    rng = np.random.default_rng(seed)
    diffs = []
    for _ in range(n_pairs):
        a = rng.normal(0.0, 1.0, 3)
        b = rng.normal(rng.uniform(0.0, 3.0), 1.0, 3)
        diffs.append(abs(permutation_p(a, b) - t_test_unpaired(a, b).p_value))
    return np.array(diffs)
