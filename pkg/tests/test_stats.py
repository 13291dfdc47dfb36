import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import permutation_differences, quad_two_tailed
from surfwave.errors import InsufficientDataError
from surfwave.stats import describe, student_t_sf2, t_test_unpaired

samples = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=8)


def test_describe_examples():
    s = describe([4, 4, 4])
    assert (s.n, s.mean, s.sd, s.sem) == (3, 4.0, 0.0, 0.0)
    s = describe([1, 2, 3])
    assert s.mean == 2.0 and s.sd == pytest.approx(1.0)
    assert s.sem == pytest.approx(0.5774, abs=1e-4)
    assert s.ci95_halfwidth == pytest.approx(4.302653 * 0.57735, rel=1e-4)
    lo, hi = s.interval()
    assert hi - lo == pytest.approx(2 * s.ci95_halfwidth)


def test_describe_single_and_empty():
    s = describe([5])
    assert s.mean == 5 and s.sd is None
    with pytest.raises(InsufficientDataError):
        s.interval()
    with pytest.raises(InsufficientDataError):
        describe([])


def test_reference_example():
    r = t_test_unpaired([1, 2, 3], [2, 3, 4])
    assert r.t_statistic == pytest.approx(-1.2247, abs=1e-4)
    assert r.degrees_of_freedom == pytest.approx(4.0)
    assert r.p_value == pytest.approx(quad_two_tailed(r.t_statistic, 4), abs=1e-9)
    assert r.p_value == pytest.approx(0.2878, abs=1e-3)
    assert not r.significant


@pytest.mark.parametrize("t, df", [(0.3, 1.0), (2.0, 2.5), (-4.1, 7.3), (1.96, 200.0), (12.0, 3.0)])
def test_tail_probability_against_quadrature(t, df):
    assert student_t_sf2(t, df) == pytest.approx(quad_two_tailed(t, df), abs=1e-9)


def test_identical_samples():
    r = t_test_unpaired([1, 2, 3], [1, 2, 3])
    assert r.t_statistic == 0 and r.p_value == pytest.approx(1.0)


def test_degenerate_cases():
    r = t_test_unpaired([0, 0], [10, 10])
    assert r.t_statistic == -math.inf and r.p_value < 1e-6 and r.significant
    r = t_test_unpaired([3, 3, 3], [3, 3])
    assert r.t_statistic == 0 and r.p_value == 1.0 and not r.significant


def test_too_few_samples():
    with pytest.raises(InsufficientDataError):
        t_test_unpaired([1], [1, 2])


def test_pooled_matches_welch_for_equal_variance():
    a, b = [1.0, 2.0, 3.0], [3.0, 4.0, 5.0]
    w = t_test_unpaired(a, b)
    p = t_test_unpaired(a, b, equal_var=True)
    assert p.t_statistic == pytest.approx(w.t_statistic)
    assert p.degrees_of_freedom == 4 and p.p_value == pytest.approx(w.p_value)


def test_welch_against_scipy():
    from scipy import stats

    a, b = [4.1, 3.9, 4.4, 4.0], [4.6, 5.1, 4.8]
    r = t_test_unpaired(a, b)
    ref = stats.ttest_ind(a, b, equal_var=False)
    assert r.t_statistic == pytest.approx(ref.statistic, rel=1e-12)
    assert r.p_value == pytest.approx(ref.pvalue, abs=1e-9)


@given(a=samples, b=samples)
def test_symmetry(a, b):
    assume(np.var(a) + np.var(b) > 1e-6)
    r1, r2 = t_test_unpaired(a, b), t_test_unpaired(b, a)
    assert r1.t_statistic == -r2.t_statistic
    assert r1.p_value == r2.p_value
    assert 0.0 <= r1.p_value <= 1.0
    assert r1.significant == (r1.p_value < 0.05)


@given(a=samples, b=samples, shift=st.floats(-1e3, 1e3))
def test_location_invariance(a, b, shift):
    # well-conditioned samples: spread not lost to cancellation after shifting
    size = max(np.abs(a).max(), np.abs(b).max()) + abs(shift)
    assume(min(np.std(a), np.std(b)) > 1e-2 * size)
    r1 = t_test_unpaired(a, b)
    r2 = t_test_unpaired(np.add(a, shift), np.add(b, shift))
    assert r2.t_statistic == pytest.approx(r1.t_statistic, rel=1e-12, abs=1e-12)
    assert r2.p_value == pytest.approx(r1.p_value, rel=1e-12, abs=1e-12)


@given(a=samples, b=samples, scale=st.floats(1e-3, 1e3))
def test_scale_equivariance(a, b, scale):
    assume(min(np.std(a), np.std(b)) > 1e-3)
    r1 = t_test_unpaired(a, b)
    r2 = t_test_unpaired(np.multiply(a, scale), np.multiply(b, scale))
    assert r2.t_statistic == pytest.approx(r1.t_statistic, rel=1e-12)
    assert r2.p_value == pytest.approx(r1.p_value, rel=1e-12, abs=1e-12)


def test_permutation_agreement():
    # 3 + 3 relabellings give p in steps of 0.05, so agreement is judged
    # on the typical pair rather than every pair
    diffs = permutation_differences()
    assert np.median(diffs) <= 0.05
    assert np.mean(diffs) <= 0.05
