"""Candidate uniform equilibrium and exact payoff oracles.

Two independent payoff routes are kept on purpose: ``uniform_payoff`` uses the
binomial distribution of wins, ``profile_payoff`` convolves per-battle win
probabilities one battle at a time.  Tests check one against the other.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .binomial import pmf_vector
from .errors import DomainError, StructuralError
from .rules import ContestParams, PrizeRule, require_feasible, spread

Player = Literal["A", "B"]


def _check_player(player):
    if player not in ("A", "B"):
        raise DomainError(f"player must be 'A' or 'B', got {player!r}")


@dataclass(frozen=True)
class EquilibriumSolution:
    p_A: float
    p_B: float
    x_A: float
    x_B: float
    spread: float
    payoff_A: float
    payoff_B: float
    total_effort: float

    def effort(self, player: Player) -> float:
        return self.x_A if player == "A" else self.x_B

    def payoff(self, player: Player) -> float:
        return self.payoff_A if player == "A" else self.payoff_B


def baseline_probs(params: ContestParams) -> tuple[float, float]:
    """Per-battle win probabilities of A and B at any candidate equilibrium."""
    # c_B^r / (c_A^r + c_B^r) written as a logistic in r ln(c_A / c_B)
    z = params.r * np.log(params.c_A / params.c_B)
    p_A = 1.0 / (1.0 + np.exp(z))
    p_B = 1.0 / (1.0 + np.exp(-z))
    return float(p_A), float(p_B)


def candidate_equilibrium(params: ContestParams, rule: PrizeRule) -> EquilibriumSolution:
    """Solution of the first-order conditions for uniform strategies."""
    _check_rule(params, rule)
    p_A, p_B = baseline_probs(params)
    V = spread(rule, p_A)
    base = params.r * p_A * p_B * V
    x_A, x_B = base / params.c_A, base / params.c_B
    return EquilibriumSolution(
        p_A=p_A,
        p_B=p_B,
        x_A=x_A,
        x_B=x_B,
        spread=V,
        payoff_A=uniform_payoff(params, rule, x_A, x_B, "A"),
        payoff_B=uniform_payoff(params, rule, x_A, x_B, "B"),
        total_effort=params.n * (x_A + x_B),
    )


def _check_rule(params, rule):
    if rule.n != params.n:
        raise StructuralError(f"rule has n={rule.n} but the contest has n={params.n}")
    require_feasible(rule)


def battle_win_prob(x_own, x_other, r: float):
    """Tullock success probability; 1/2 when both efforts are zero."""
    x_own = np.asarray(x_own, dtype=float)
    x_other = np.asarray(x_other, dtype=float)
    if np.any(x_own < 0) or np.any(x_other < 0):
        raise DomainError("efforts must be non-negative")
    with np.errstate(divide="ignore", invalid="ignore"):
        # 1 / (1 + (x_other / x_own)^r) avoids overflow of x^r for large efforts
        ratio = np.where(x_own > 0, x_other / np.where(x_own > 0, x_own, 1.0), np.inf)
        p = 1.0 / (1.0 + ratio**r)
    p = np.where((x_own == 0) & (x_other == 0), 0.5, p)
    return float(p) if p.ndim == 0 else p


def win_distribution(probs: Sequence[float]) -> np.ndarray:
    """Distribution of the number of wins for independent battles (Poisson-binomial)."""
    dist = np.zeros(len(probs) + 1)
    dist[0] = 1.0
    for j, q in enumerate(probs):
        if not 0.0 <= q <= 1.0:
            raise DomainError(f"probability outside [0, 1]: {q}")
        head = dist[: j + 2].copy()
        dist[: j + 2] = head * (1.0 - q)
        dist[1 : j + 2] += head[: j + 1] * q
    return dist


def profile_payoff(
    params: ContestParams,
    rule: PrizeRule,
    efforts_A: Sequence[float],
    efforts_B: Sequence[float],
    player: Player,
) -> float:
    """Expected prize minus cost for arbitrary pure effort profiles."""
    _check_player(player)
    _check_rule(params, rule)
    xa = np.asarray(efforts_A, dtype=float)
    xb = np.asarray(efforts_B, dtype=float)
    if xa.shape != (params.n,) or xb.shape != (params.n,):
        raise StructuralError(f"effort profiles must have length n={params.n}")
    own, other = (xa, xb) if player == "A" else (xb, xa)
    probs = battle_win_prob(own, other, params.r)
    dist = win_distribution(np.atleast_1d(probs))
    return float(dist @ rule.values - params.cost(player) * own.sum())


def uniform_payoff(params: ContestParams, rule: PrizeRule, x_A, x_B, player: Player):
    """Payoff when both players spread effort evenly; vectorized over efforts."""
    _check_player(player)
    _check_rule(params, rule)
    x_A = np.asarray(x_A, dtype=float)
    x_B = np.asarray(x_B, dtype=float)
    own, other = (x_A, x_B) if player == "A" else (x_B, x_A)
    p = battle_win_prob(own, other, params.r)
    prize = pmf_vector(params.n, p) @ rule.values
    out = prize - params.n * params.cost(player) * own
    return float(out) if np.ndim(out) == 0 else out
