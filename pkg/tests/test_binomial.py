import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multicontest.binomial import log_choose, log_pmf, pmf, pmf_vector, upper_tail
from multicontest.errors import DomainError


def exact_pmf(k, n, p: Fraction) -> Fraction:
    return math.comb(n, k) * p**k * (1 - p) ** (n - k)


@pytest.mark.parametrize("n,k,expected", [
    (2, 1, math.log(2)),
    (7, 3, math.log(math.factorial(7) // (math.factorial(3) * math.factorial(4)))),
    (19, 16, math.log(math.factorial(19) // (math.factorial(16) * math.factorial(3)))),
])
def test_log_choose_examples(n, k, expected):
    assert log_choose(n, k) == pytest.approx(expected, rel=1e-12)


def test_log_choose_exact_up_to_1000():
    for n in (10, 137, 500, 1000):
        for k in (0, 1, n // 3, n // 2, n):
            assert log_choose(n, k) == pytest.approx(math.log(math.comb(n, k)) if k not in (0, n) else 0.0,
                                                     rel=1e-12, abs=1e-15)


def test_log_choose_large_n_uses_lgamma():
    assert log_choose(10**6, 3) == pytest.approx(math.log(math.comb(10**6, 3)), rel=1e-12)


@pytest.mark.parametrize("n,k", [(3, 4), (-1, 0), (3, -1)])
def test_log_choose_domain(n, k):
    with pytest.raises(DomainError):
        log_choose(n, k)


def test_pmf_examples():
    assert pmf(1, 2, 0.5) == pytest.approx(0.5, abs=1e-15)
    assert pmf(2, 3, 0.25) == pytest.approx(float(exact_pmf(2, 3, Fraction(1, 4))), rel=1e-13)
    assert pmf(2, 3, 0.25) == pytest.approx(0.140625, rel=1e-13)
    assert pmf(0, 5, 0.0) == 1.0


def test_pmf_degenerate_endpoints_are_exact():
    assert pmf(5, 5, 1.0) == 1.0
    assert pmf(3, 5, 1.0) == 0.0
    assert pmf(1, 5, 0.0) == 0.0
    assert not np.any(np.isnan(pmf_vector(6, np.array([0.0, 1.0]))))


@pytest.mark.parametrize("p", [-0.1, 1.1, float("nan")])
def test_pmf_rejects_bad_probability(p):
    with pytest.raises(DomainError):
        pmf(1, 3, p)


def test_upper_tail_examples():
    assert upper_tail(0, 4, 0.3) == pytest.approx(1.0, abs=1e-12)
    assert upper_tail(3, 5, 0.5) == pytest.approx(0.5, abs=1e-14)
    oracle = exact_pmf(2, 3, Fraction(1, 4)) + exact_pmf(3, 3, Fraction(1, 4))
    assert upper_tail(2, 3, 0.25) == pytest.approx(float(oracle), rel=1e-13)
    assert upper_tail(2, 3, 0.25) == pytest.approx(0.15625, rel=1e-13)
    assert upper_tail(4, 3, 0.25) == 0.0


def test_pmf_survives_tiny_probability():
    # direct products underflow here; the log-space route must not
    v = pmf_vector(200, 1e-4)
    assert abs(v.sum() - 1.0) < 1e-10
    assert np.isfinite(log_pmf(100, 200, 1e-4))
    assert log_pmf(100, 200, 1e-4) == pytest.approx(
        math.log(math.comb(200, 100)) + 100 * math.log(1e-4) + 100 * math.log1p(-1e-4), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(0, 200), p=st.floats(0.001, 0.999))
def test_pmf_sums_to_one(n, p):
    assert abs(pmf_vector(n, p).sum() - 1.0) < 1e-10


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 80), data=st.data(), p=st.floats(0.0, 1.0))
def test_tail_difference_is_pmf(n, data, p):
    k = data.draw(st.integers(0, n))
    assert upper_tail(k, n, p) - upper_tail(k + 1, n, p) == pytest.approx(pmf(k, n, p), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 120), data=st.data(), m=st.integers(0, 2**20))
def test_pmf_reflection(n, data, m):
    # dyadic p keeps 1 - p exact
    p = m / 2**20
    k = data.draw(st.integers(0, n))
    assert pmf(k, n, p) == pytest.approx(pmf(n - k, n, 1.0 - p), rel=1e-12, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 60), data=st.data(), p=st.floats(0.01, 0.99))
def test_upper_tail_nonincreasing_and_starts_at_one(n, data, p):
    tails = [upper_tail(k, n, p) for k in range(n + 2)]
    assert abs(tails[0] - 1.0) <= 1e-12
    assert all(b <= a + 1e-15 for a, b in zip(tails, tails[1:]))


@pytest.mark.parametrize("n", [1, 4, 9, 25])
@pytest.mark.parametrize("p", [0.1, 0.37, 0.5, 0.81])
def test_tail_derivative_identity(n, p):
    h = 1e-6

    def small_tail(k, q, use_upper):
        # difference the smaller of H and 1 - H to avoid cancellation near 1
        return upper_tail(k, n, q) if use_upper else -float(pmf_vector(n, q)[:k].sum())

    for k in range(1, n + 1):
        use_upper = upper_tail(k, n, p) < 0.5
        fd = (small_tail(k, p + h, use_upper) - small_tail(k, p - h, use_upper)) / (2 * h)
        exact = n * pmf(k - 1, n - 1, p)
        assert fd == pytest.approx(exact, rel=1e-5, abs=1e-10)
