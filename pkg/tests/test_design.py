from fractions import Fraction
from math import comb

import numpy as np
import pytest

from multicontest.design import (
    OutsideVerifiedRegime,
    brute_force_optimal,
    g_values,
    is_single_peaked,
    optimal_k_star,
    optimal_rule,
    spread_rearranged,
    sweep_threshold,
    existence_bounds,
    total_effort,
)
from multicontest.equilibrium import candidate_equilibrium
from multicontest.errors import DomainError, EnumerationBudgetError, MonotonicityError
from multicontest.rules import ContestParams, majority_rule, random_feasible_rule, spread, tie_margin_rule


def exact_g(n, p):
    p = Fraction(p)
    q = 1 - p
    m = n - 1
    return [comb(m, k) * (p**k * q ** (m - k) + p ** (m - k) * q**k) for k in range(n)]


class TestG:
    def test_three_at_half(self):
        assert np.allclose(g_values(3, 0.5), [0.5, 1.0, 0.5], atol=1e-15)

    def test_five_at_ninety(self):
        g = g_values(5, 0.9)
        assert np.allclose(g, [float(x) for x in exact_g(5, Fraction(9, 10))], atol=1e-15)
        assert np.allclose(g, [0.6562, 0.2952, 0.0972, 0.2952, 0.6562], atol=1e-12)

    def test_single_battle(self):
        for p in (0.5, 0.77, 0.99):
            assert np.array_equal(g_values(1, p), [2.0])

    def test_symmetric(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 60))
            g = g_values(n, float(rng.uniform(0.5, 1)))
            assert np.allclose(g, g[::-1], atol=1e-12, rtol=0)


class TestKStar:
    def test_even_chance_gives_majority(self):
        for n in range(1, 40, 2):
            assert optimal_k_star(n, 0.5) == (n - 1) // 2

    def test_strong_favourite(self):
        assert optimal_k_star(5, 0.9) == 0

    def test_two_battles(self):
        assert optimal_k_star(2, 0.5) == 0

    def test_single_peaked(self, rng):
        for _ in range(400):
            n = int(rng.integers(1, 51))
            p = float(rng.uniform(0.5, 0.999))
            g = g_values(n, p)[: (n - 1) // 2 + 1]
            assert is_single_peaked(g)
            k = optimal_k_star(n, p)
            assert 0 <= k <= (n - 1) / 2
            assert g[k] == pytest.approx(g.max(), rel=1e-12)

    def test_peak_shape_helper(self):
        assert is_single_peaked([1, 2, 3, 3, 2])
        assert not is_single_peaked([1, 3, 2, 3])


class TestOptimalRule:
    def test_symmetric_five(self):
        out = optimal_rule(ContestParams(5, 0.3, 1, 1))
        assert out.threshold_T == 3
        assert out.rule == majority_rule(5)

    def test_strong_favourite_full_sweep(self):
        out = optimal_rule(ContestParams.from_baseline(5, 0.3, 0.9))
        assert out.k_star == 0 and out.threshold_T == 5
        assert out.margin == 4

    def test_even_split_on_ties(self):
        out = optimal_rule(ContestParams(4, 0.4, 1, 1))
        assert out.threshold_T == 3
        assert np.allclose(out.rule.values, [0, 0, 0.5, 1, 1])

    def test_invariants(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 30))
            r = float(rng.uniform(0.01, 2 / (n + 1)))
            params = ContestParams(n, r, 1.0, float(rng.uniform(1, 100)))
            out = optimal_rule(params)
            assert 0 <= out.k_star <= (n - 1) / 2
            assert n / 2 < out.threshold_T <= n
            assert out.rule == tie_margin_rule(n, out.threshold_T)
            assert out.total_effort == pytest.approx(candidate_equilibrium(params, out.rule).total_effort, rel=1e-12)
            assert out.verified_regime and not out.warnings

    def test_warns_outside_regime(self):
        with pytest.warns(OutsideVerifiedRegime):
            out = optimal_rule(ContestParams(20, 0.8, 1, 1.5))
        assert not out.verified_regime and out.warnings

    def test_beats_random_rules(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 20))
            params = ContestParams(n, 1 / (n + 1), 1.0, float(rng.uniform(1, 30)))
            best = optimal_rule(params).total_effort
            for _ in range(20):
                te = candidate_equilibrium(params, random_feasible_rule(n, rng)).total_effort
                assert te <= best * (1 + 1e-12)


class TestBruteForce:
    def test_agrees_with_closed_form(self, rng):
        for n in range(1, 10):
            for _ in range(5):
                params = ContestParams.from_baseline(n, 1 / (n + 1), float(rng.uniform(0.5, 0.99)))
                rule, te = brute_force_optimal(params)
                out = optimal_rule(params)
                assert te == pytest.approx(out.total_effort, abs=1e-12)
                assert out.total_effort >= te - 1e-12

    def test_finer_grid_keeps_majority(self):
        rule, te = brute_force_optimal(ContestParams(3, 0.5, 1, 1), (0, 0.25, 0.5, 0.75, 1))
        assert rule == majority_rule(3)
        assert te == pytest.approx(optimal_rule(ContestParams(3, 0.5, 1, 1)).total_effort, abs=1e-12)

    def test_single_battle(self):
        rule, _ = brute_force_optimal(ContestParams(1, 1.0, 1, 1))
        assert np.array_equal(rule.values, [0.0, 1.0])

    def test_budget(self):
        with pytest.raises(EnumerationBudgetError):
            brute_force_optimal(ContestParams(41, 0.01, 1, 1), np.linspace(0, 1, 11), max_rules=1000)

    def test_grid_must_hold_vertices(self):
        with pytest.raises(DomainError):
            brute_force_optimal(ContestParams(3, 0.5, 1, 1), (0, 1))

    def test_relaxed_solution_split_condition(self, rng):
        # lower-half shares sit at 1/2 exactly where g falls from k-1 to k
        for _ in range(100):
            n = int(rng.integers(2, 30))
            p = float(rng.uniform(0.5, 0.99))
            out = optimal_rule(ContestParams.from_baseline(n, 1 / (n + 1), p))
            g = g_values(n, p)
            v = out.rule.values
            for k in range(1, (n + 1) // 2):
                drop = g[k - 1] > g[k] * (1 + 1e-12)
                assert (v[k] == 0.5) == drop, (n, p, k)
                assert v[n - k] == 1.0 - v[k]


def test_rearranged_spread(rng):
    for _ in range(300):
        n = int(rng.integers(1, 40))
        rule = random_feasible_rule(n, rng)
        p = float(rng.uniform(0, 1))
        assert spread_rearranged(rule, p) == pytest.approx(spread(rule, p), abs=1e-12)


def test_total_effort_formula():
    params = ContestParams(3, 0.5, 1, 1)
    assert total_effort(params, spread(majority_rule(3), 0.5)) == pytest.approx(0.375, abs=1e-15)


class TestSweep:
    def test_five(self):
        grid = [0.5 + 0.05 * i for i in range(10)]
        T = [t for _, t in sweep_threshold(5, grid)]
        assert T[0] == 3 and T[-1] == 5
        assert all(b >= a for a, b in zip(T, T[1:]))

    def test_three_near_half(self):
        assert {t for _, t in sweep_threshold(3, np.linspace(0.5, 0.6, 11))} == {2}

    def test_single_battle(self):
        assert {t for _, t in sweep_threshold(1, np.linspace(0.5, 0.99, 20))} == {1}

    def test_monotone_up_to_25(self):
        for n in range(1, 26):
            T = [t for _, t in sweep_threshold(n, np.linspace(0.5, 0.999, 100))]
            assert all(b >= a for a, b in zip(T, T[1:]))

    def test_rejects_bad_grid(self):
        with pytest.raises(DomainError):
            sweep_threshold(5, [0.6, 0.55])
        with pytest.raises(DomainError):
            sweep_threshold(5, [0.4])

    def test_monotonicity_error_type(self):
        assert issubclass(MonotonicityError, AssertionError)


class TestBoundsTable:
    def test_three(self):
        assert existence_bounds(3) == pytest.approx((1.0, 0.5, 2.0))

    def test_exact_values(self):
        for n in (3, 5, 7, 9, 11, 21, 31, 51, 101):
            sym = min(Fraction(1), Fraction(2**n, n * comb(n - 1, (n - 1) // 2)))
            s, a, ratio = existence_bounds(n)
            assert s == pytest.approx(float(sym), rel=1e-13)
            assert a == pytest.approx(2 / (n + 1), rel=1e-15)
            assert ratio == pytest.approx(float(sym * (n + 1) / 2), rel=1e-13)

    def test_even_rejected(self):
        with pytest.raises(DomainError):
            existence_bounds(4)
