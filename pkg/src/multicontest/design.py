"""Effort-maximizing prize design.

Total effort at the candidate equilibrium is proportional to the effective
prize spread at the baseline probability, so the designer maximizes a linear
function of the shares.  The optimum is a majority rule with a tie margin whose
threshold is read off the profile ``g(k) = theta(k|n-1,p) + theta(n-1-k|n-1,p)``.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .binomial import pmf_vector
from .equilibrium import EquilibriumSolution, baseline_probs, candidate_equilibrium
from .errors import DomainError, EnumerationBudgetError, MonotonicityError
from .rules import ContestParams, PrizeRule, spread, tie_margin_rule
from .verification import sufficient_condition

TIE_RTOL = 1e-12
MAX_RULES = 10**7


class OutsideVerifiedRegime(UserWarning):
    """Design computed with r above 2/(n+1), where existence is not guaranteed."""


@dataclass(frozen=True)
class DesignOutcome:
    g_profile: np.ndarray
    k_star: int
    threshold_T: int
    rule: PrizeRule
    total_effort: float
    equilibrium: EquilibriumSolution
    verified_regime: bool = True
    warnings: tuple = field(default=())

    @property
    def margin(self) -> int:
        return 2 * self.threshold_T - (self.rule.n + 1)


def g_values(n: int, p: float) -> np.ndarray:
    """g(k) for k = 0..n-1: chance that k or n-1-k of the other battles are won."""
    if n < 1:
        raise DomainError("n must be positive")
    theta = pmf_vector(n - 1, p)
    return theta + theta[::-1]


def optimal_k_star(n: int, p: float) -> int:
    """Largest maximizer of g over 0 <= k <= (n-1)/2."""
    g = g_values(n, p)[: (n - 1) // 2 + 1]
    top = g.max()
    k = int(np.flatnonzero(g >= top * (1.0 - TIE_RTOL))[-1])
    if not is_single_peaked(g):
        raise AssertionError(f"g profile not single-peaked for n={n}, p={p}: {g}")
    return k


def is_single_peaked(seq: Sequence[float], rtol: float = TIE_RTOL) -> bool:
    """Weakly increasing then weakly decreasing, up to relative ties."""
    seq = np.asarray(seq, dtype=float)
    d = np.diff(seq)
    scale = np.maximum(np.abs(seq[1:]), np.abs(seq[:-1])) * rtol
    sign = np.where(d > scale, 1, np.where(d < -scale, -1, 0))
    nz = sign[sign != 0]
    # once it goes down it never goes up again
    return not np.any(np.diff(nz) > 0)


def total_effort(params: ContestParams, V: float) -> float:
    p_A, p_B = baseline_probs(params)
    return params.n * params.r * p_A * p_B * (1.0 / params.c_A + 1.0 / params.c_B) * V


def optimal_rule(params: ContestParams) -> DesignOutcome:
    """Tie-margin rule with threshold ``T = n - k*`` evaluated at the baseline probability."""
    n = params.n
    p_A, _ = baseline_probs(params)
    g = g_values(n, p_A)
    k_star = optimal_k_star(n, p_A)
    T = n - k_star
    rule = tie_margin_rule(n, T)
    eq = candidate_equilibrium(params, rule)
    ok = sufficient_condition(n, params.r)
    notes = ()
    if not ok:
        msg = f"r={params.r} exceeds 2/(n+1)={2 / (n + 1):.6g}; outcome is outside the verified regime"
        warnings.warn(msg, OutsideVerifiedRegime, stacklevel=2)
        notes = (msg,)
    return DesignOutcome(g, k_star, T, rule, eq.total_effort, eq, ok, notes)


def spread_rearranged(rule: PrizeRule, p: float) -> float:
    """V written as theta(n-1|n-1,p) + sum_k [theta(k-1) - theta(k)] v(k)."""
    n = rule.n
    theta = pmf_vector(n - 1, p)
    v = rule.values
    coef = theta[:-1] - theta[1:]  # k = 1..n-1
    return float(theta[n - 1] + coef @ v[1:n])


def _enumeration_free_slots(n: int) -> np.ndarray:
    """Indices above n/2 whose share is free (v(n) = 1 and an even midpoint are pinned)."""
    return np.arange(n // 2 + 1, n)


def count_enumerated_rules(n: int, value_grid: Sequence[float]) -> int:
    allowed = sorted({float(x) for x in value_grid if x >= 0.5})
    m = len(_enumeration_free_slots(n))
    return math.comb(len(allowed) + m - 1, m)


def brute_force_optimal(
    params: ContestParams,
    value_grid: Sequence[float] = (0.0, 0.5, 1.0),
    max_rules: int = MAX_RULES,
) -> tuple[PrizeRule, float]:
    """Exhaustive search over normalized feasible rules with shares on ``value_grid``.

    Shares for ``k > n/2`` come from the grid, the rest follow by budget
    balance.  Monotonicity forces upper-half shares into [1/2, 1], so the
    enumeration is over non-decreasing sequences from that part of the grid.
    """
    grid = np.asarray(value_grid, dtype=float)
    if np.any((grid < 0) | (grid > 1)):
        raise DomainError("value grid must lie in [0, 1]")
    if not {0.0, 0.5, 1.0} <= set(grid.tolist()):
        raise DomainError("value grid must contain 0, 1/2 and 1")
    n = params.n
    count = count_enumerated_rules(n, grid)
    if count > max_rules:
        raise EnumerationBudgetError(f"{count} rules exceed the budget of {max_rules}")

    allowed = sorted({float(x) for x in grid if x >= 0.5})
    slots = _enumeration_free_slots(n)
    rows = np.array(list(itertools.combinations_with_replacement(allowed, len(slots))), dtype=float)
    rows = rows.reshape(len(rows), len(slots))
    shares = np.empty((len(rows), n + 1))
    shares[:, n] = 1.0
    shares[:, 0] = 0.0
    shares[:, slots] = rows
    shares[:, n - slots] = 1.0 - rows
    if n % 2 == 0:
        shares[:, n // 2] = 0.5

    p_A, _ = baseline_probs(params)
    theta = pmf_vector(n - 1, p_A)
    objective = np.diff(shares, axis=1) @ theta
    best = objective.max()
    ties = np.flatnonzero(objective >= best - TIE_RTOL * abs(best))

    chosen = None
    for i in ties:
        if _is_tie_margin_shape(shares[i]):
            chosen = i
            break
    if chosen is None:
        chosen = min(ties, key=lambda i: tuple(shares[i]))
    rule = PrizeRule(n, shares[chosen])
    return rule, total_effort(params, spread(rule, p_A))


def _is_tie_margin_shape(v) -> bool:
    return bool(np.all(np.isin(v, (0.0, 0.5, 1.0))))


def sweep_threshold(n: int, p_grid: Sequence[float]) -> list[tuple[float, int]]:
    """Optimal threshold T along an ascending grid of baseline probabilities."""
    p_grid = [float(p) for p in p_grid]
    if any(p < 0.5 or p >= 1.0 for p in p_grid):
        raise DomainError("p grid must lie in [0.5, 1)")
    if any(b < a for a, b in zip(p_grid, p_grid[1:])):
        raise DomainError("p grid must be ascending")
    out = [(p, n - optimal_k_star(n, p)) for p in p_grid]
    for (p0, t0), (p1, t1) in zip(out, out[1:]):
        if t1 < t0:
            raise MonotonicityError(f"threshold drops from {t0} at p={p0} to {t1} at p={p1} (n={n})")
    return out


def existence_bounds(n: int) -> tuple[float, float, float]:
    """Largest r guaranteeing a pure equilibrium under majority rule (odd n).

    Returns (symmetric players, arbitrarily asymmetric players, their ratio).
    """
    if n < 1 or n % 2 == 0:
        raise DomainError("bounds are defined for odd n")
    sym = min(1.0, math.exp(n * math.log(2) - math.log(n) - math.log(math.comb(n - 1, (n - 1) // 2))))
    asym = 2.0 / (n + 1)
    return sym, asym, sym / asym
