"""Prize allocation rules and contest primitives.

A prize rule maps the number of battles a player wins, ``k = 0..n``, to that
player's share of a unit prize budget.  A rule is feasible when it is
non-negative, weakly increasing in ``k`` and budget balanced
(``v(k) + v(n - k) = 1``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from .binomial import log_pmf
from .errors import DegenerateRuleError, DomainError, InfeasibleRuleError, StructuralError

BUDGET_TOL = 1e-9


class Violation(NamedTuple):
    clause: str  # "non-negativity" | "monotonicity" | "budget-balance"
    index: int
    magnitude: float

    def __str__(self):
        return f"{self.clause} at k={self.index} (by {self.magnitude:.3g})"


@dataclass(frozen=True)
class ContestParams:
    """Primitives of the game: battle count, discriminatory power and costs."""

    n: int
    r: float
    c_A: float
    c_B: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if not 0.0 < self.r <= 1.0:
            raise DomainError(f"r must lie in (0, 1], got {self.r}")
        if not (0.0 < self.c_A <= self.c_B) or not np.isfinite(self.c_B):
            raise DomainError(f"costs must satisfy 0 < c_A <= c_B, got ({self.c_A}, {self.c_B})")
        object.__setattr__(self, "n", int(self.n))

    def cost(self, player: str) -> float:
        return self.c_A if player == "A" else self.c_B

    @classmethod
    def from_baseline(cls, n: int, r: float, p_A: float, c_A: float = 1.0) -> "ContestParams":
        """Choose ``c_B`` so that the strong player's baseline win probability is ``p_A``.

        Inverts ``p_A = c_B^r / (c_A^r + c_B^r)``; requires ``1/2 <= p_A < 1``.
        """
        if not 0.5 <= p_A < 1.0:
            raise DomainError(f"baseline probability of A must lie in [0.5, 1), got {p_A}")
        c_B = c_A * (p_A / (1.0 - p_A)) ** (1.0 / r)
        return cls(n, r, c_A, max(c_B, c_A))

    @classmethod
    def from_weak_baseline(cls, n: int, r: float, p_B: float, c_A: float = 1.0) -> "ContestParams":
        return cls.from_baseline(n, r, 1.0 - p_B, c_A)


@dataclass(frozen=True, eq=False, init=False)
class PrizeRule:
    """Shares ``v(0..n)`` of a unit prize, indexed by battles won."""

    n: int
    shares: tuple

    def __init__(self, n: int, shares: Sequence[float] | None = None):
        if shares is None:  # PrizeRule(shares) shorthand
            shares, n = n, len(n) - 1
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "shares", tuple(float(s) for s in shares))

    def __eq__(self, other):
        return isinstance(other, PrizeRule) and self.shares == other.shares

    def __hash__(self):
        return hash(self.shares)

    def __repr__(self):
        return f"PrizeRule(n={self.n}, shares={list(self.shares)})"

    @cached_property
    def values(self) -> np.ndarray:
        v = np.array(self.shares)
        v.setflags(write=False)
        return v

    @cached_property
    def increments(self) -> np.ndarray:
        """Delta v(t) = v(t+1) - v(t) for t = 0..n-1."""
        d = np.diff(self.values)
        d.setflags(write=False)
        return d

    @cached_property
    def violations(self) -> list:
        return validate(self)

    @property
    def feasible(self) -> bool:
        return not self.violations


def validate(rule: PrizeRule, tol: float = BUDGET_TOL) -> list:
    """Every violated feasibility clause; an empty list means the rule is feasible."""
    if len(rule.shares) != rule.n + 1:
        raise StructuralError(f"expected {rule.n + 1} shares for n={rule.n}, got {len(rule.shares)}")
    v = np.array(rule.shares)
    out = []
    for k in range(rule.n + 1):
        if v[k] < 0:
            out.append(Violation("non-negativity", k, float(-v[k])))
    for k in range(rule.n):
        if v[k + 1] < v[k]:
            out.append(Violation("monotonicity", k, float(v[k] - v[k + 1])))
    for k in range(rule.n // 2 + 1):
        gap = abs(v[k] + v[rule.n - k] - 1.0)
        if gap > tol:
            out.append(Violation("budget-balance", k, float(gap)))
    return out


def require_feasible(rule: PrizeRule) -> PrizeRule:
    if rule.violations:
        raise InfeasibleRuleError(rule.violations)
    return rule


def majority_rule(n: int) -> PrizeRule:
    """Simple majority; on even ``n`` a tied count splits the prize."""
    if n < 1:
        raise DomainError("n must be positive")
    shares = [1.0 if 2 * k > n else (0.5 if 2 * k == n else 0.0) for k in range(n + 1)]
    return PrizeRule(n, shares)


def tie_margin_rule(n: int, T: int) -> PrizeRule:
    """Whole prize for reaching ``T`` wins, an even split when nobody does."""
    if not (2 * T > n and T <= n):
        raise DomainError(f"threshold T must satisfy n/2 < T <= n, got T={T}, n={n}")
    shares = [1.0 if k >= T else (0.0 if k <= n - T else 0.5) for k in range(n + 1)]
    return PrizeRule(n, shares)


def tie_margin_size(n: int, T: int) -> int:
    return 2 * T - (n + 1)


def random_feasible_rule(n: int, rng: np.random.Generator) -> PrizeRule:
    """Draw a normalized feasible rule.

    Shares above the midpoint are i.i.d. uniform on [1/2, 1], sorted, with
    ``v(n) = 1``; the lower half follows from budget balance.
    """
    v = np.empty(n + 1)
    upper = np.arange(n // 2 + 1, n + 1)
    draws = np.sort(rng.uniform(0.5, 1.0, size=len(upper) - 1))
    v[upper] = np.append(draws, 1.0)
    v[n - upper] = 1.0 - v[upper]
    if n % 2 == 0:
        v[n // 2] = 0.5
    return PrizeRule(n, v)


def _spread_log_terms(rule: PrizeRule, p):
    """ln(Delta v(t) theta(t | n-1, p)), shape p.shape + (n,)."""
    p = np.asarray(p, dtype=float)
    t = np.arange(rule.n)
    with np.errstate(divide="ignore"):
        log_dv = np.log(rule.increments)
    return log_dv + log_pmf(t, rule.n - 1, p[..., None])


def spread(rule: PrizeRule, p):
    """Effective prize spread: the expected gain from one extra battle win."""
    require_feasible(rule)
    out = np.exp(logsumexp(_spread_log_terms(rule, p), axis=-1))
    return float(out) if out.ndim == 0 else out


def spread_log_slope(rule: PrizeRule, p):
    """p(1-p) V'(p) / V(p), evaluated as a weighted mean so it survives underflow.

    Equals ``sum_t w_t t - (n-1) p`` with weights proportional to
    ``Delta v(t) theta(t | n-1, p)``.
    """
    require_feasible(rule)
    p = np.asarray(p, dtype=float)
    logs = _spread_log_terms(rule, p)
    if np.any(np.all(np.isneginf(logs), axis=-1)):
        raise DegenerateRuleError("effective prize spread is zero")
    w = np.exp(logs - logsumexp(logs, axis=-1, keepdims=True))
    out = w @ np.arange(rule.n) - (rule.n - 1) * p
    return float(out) if out.ndim == 0 else out


def spread_derivative(rule: PrizeRule, p):
    """dV/dp from the identity p(1-p)V'(p) = sum_t Delta v(t) theta(t|n-1,p) (t - (n-1)p)."""
    require_feasible(rule)
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0.0) | (p >= 1.0)):
        raise DomainError("spread_derivative needs 0 < p < 1")
    t = np.arange(rule.n)
    theta = np.exp(log_pmf(t, rule.n - 1, p[..., None]))
    out = (theta * (t - (rule.n - 1) * p[..., None])) @ rule.increments / (p * (1.0 - p))
    return float(out) if out.ndim == 0 else out


def load_rule(path, n: int | None = None) -> PrizeRule:
    """Read a rule file (a JSON array of ``n + 1`` shares) and validate it."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list) or not all(isinstance(x, (int, float)) for x in data):
        raise StructuralError(f"{path}: expected a single array of numbers")
    if n is not None and len(data) != n + 1:
        raise StructuralError(f"{path}: expected {n + 1} shares for n={n}, got {len(data)}")
    rule = PrizeRule(len(data) - 1, data)
    return require_feasible(rule)


def dump_rule(rule: PrizeRule, path) -> None:
    Path(path).write_text(json.dumps([float(f"{s:.9g}") for s in rule.shares]) + "\n")
