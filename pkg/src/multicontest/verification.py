"""Equilibrium verification for the candidate uniform profile.

Analytic checks (the sufficient threshold on ``r``, the sign of the weak
player's candidate payoff, the log-effort slope of the auxiliary function) are
paired with a numerical global best-response scan over a log-spaced grid.
The scan can only refute or corroborate, so the verdict is three-valued.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .binomial import pmf_vector
from .equilibrium import (
    EquilibriumSolution,
    Player,
    _check_player,
    _check_rule,
    baseline_probs,
    battle_win_prob,
    candidate_equilibrium,
    profile_payoff,
    uniform_payoff,
)
from .errors import DegenerateRuleError, DomainError, StructuralError
from .rules import ContestParams, PrizeRule, majority_rule, spread, spread_log_slope

CONFIRMED = "confirmed"
REFUTED = "refuted"
UNDETERMINED = "undetermined"

IMPROVEMENT_TOL = 1e-9
# log-effort distance within which a scan argmax counts as the candidate
LOCATION_TOL = 1e-3


@dataclass(frozen=True)
class ScanSettings:
    points: int = 2001
    min_mult: float = 1e-4
    max_mult: float = 1e4
    refine_tol: float = 1e-10


@dataclass
class VerificationReport:
    sufficient_ok: bool
    necessary_payoff_B: float
    necessary_ok: bool
    slope_A_at_candidate: float
    slope_B_at_candidate: float
    global_br_A: tuple
    global_br_B: tuple
    is_equilibrium: str
    candidate: EquilibriumSolution
    unique: bool = False
    notes: list = field(default_factory=list)

    def improvement(self, player: Player) -> float:
        br = self.global_br_A if player == "A" else self.global_br_B
        return br[1] - self.candidate.payoff(player)


def sufficient_condition(n: int, r: float) -> bool:
    """True when ``r <= 2 / (n + 1)``, which guarantees existence under every feasible rule."""
    return r <= 2.0 / (n + 1)


def necessary_payoff(params: ContestParams, rule: PrizeRule) -> float:
    """Weak player's payoff at the candidate; an equilibrium needs it non-negative."""
    _check_rule(params, rule)
    _, p_B = baseline_probs(params)
    n = params.n
    theta = pmf_vector(n, p_B)
    # H(t+1 | n, p) for t = 0..n-1, as reversed cumulative sums
    tails = np.cumsum(theta[::-1])[::-1][1:]
    prize = tails @ rule.increments
    return float(prize - n * params.r * p_B * (1.0 - p_B) * spread(rule, p_B))


def _own_prob(params, player, opponent_effort, own_effort):
    return battle_win_prob(own_effort, opponent_effort, params.r)


def slope_G(params: ContestParams, rule: PrizeRule, player: Player, opponent_effort, own_effort):
    """Derivative in log own effort of the auxiliary function sign-equivalent to the payoff slope.

    ``r [(1 - 2p) + p(1-p) V'(p)/V(p)] - 1`` with ``p`` the player's own
    per-battle win probability.  Negative everywhere means single-peaked payoff.
    """
    _check_player(player)
    _check_rule(params, rule)
    own = np.asarray(own_effort, dtype=float)
    if np.any(own <= 0) or np.any(np.asarray(opponent_effort) <= 0):
        raise DomainError("slope_G needs strictly positive efforts")
    p = _own_prob(params, player, opponent_effort, own)
    try:
        bracket = (1.0 - 2.0 * p) + spread_log_slope(rule, p)
    except DegenerateRuleError:
        raise DegenerateRuleError("effective prize spread vanishes at this effort") from None
    return params.r * bracket - 1.0


def auxiliary_G(params: ContestParams, rule: PrizeRule, player: Player, opponent_effort, own_effort):
    """ln(n r p(1-p) V(p)) - ln x - ln(n c): same sign as the payoff's log-effort derivative."""
    _check_player(player)
    _check_rule(params, rule)
    own = np.asarray(own_effort, dtype=float)
    p = _own_prob(params, player, opponent_effort, own)
    n = params.n
    with np.errstate(divide="ignore"):
        return (
            np.log(n * params.r * p * (1.0 - p) * spread(rule, p))
            - np.log(own)
            - np.log(n * params.cost(player))
        )


def payoff_log_derivative(params: ContestParams, rule: PrizeRule, player: Player, opponent_effort, own_effort):
    """Analytic d(payoff)/d(ln x) = n r p(1-p) V(p) - n c x."""
    own = np.asarray(own_effort, dtype=float)
    p = _own_prob(params, player, opponent_effort, own)
    n = params.n
    return n * params.r * p * (1.0 - p) * spread(rule, p) - n * params.cost(player) * own


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    """Golden-section search for a maximum of ``f`` on ``[lo, hi]``."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - inv_phi * (b - a), a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * max(1.0, abs(a)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def scan_grid(anchor: float, settings: ScanSettings = ScanSettings()) -> np.ndarray:
    """Log-spaced own-effort grid around ``anchor`` with 0 and the anchor itself added."""
    grid = np.geomspace(anchor * settings.min_mult, anchor * settings.max_mult, settings.points)
    grid = grid[~np.isclose(grid, anchor, rtol=1e-12, atol=0.0)]
    return np.unique(np.concatenate(([0.0, anchor], grid)))


def global_best_response(
    params: ContestParams,
    rule: PrizeRule,
    player: Player,
    opponent_effort: float,
    settings: ScanSettings = ScanSettings(),
    anchor: float | None = None,
) -> tuple[float, float]:
    """Best uniform effort against a uniform opponent, by grid scan plus golden-section refinement.

    The grid is anchored at the player's candidate effort unless ``anchor`` is
    given.  Ties go to the smallest effort.
    """
    _check_player(player)
    if opponent_effort <= 0:
        raise DomainError("opponent effort must be positive")
    if anchor is None:
        anchor = candidate_equilibrium(params, rule).effort(player)
    if anchor <= 0:
        anchor = opponent_effort

    def payoff(x):
        if player == "A":
            return uniform_payoff(params, rule, x, opponent_effort, "A")
        return uniform_payoff(params, rule, opponent_effort, x, "B")

    grid = scan_grid(anchor, settings)
    values = payoff(grid)
    i = int(np.argmax(values))  # first occurrence = smallest effort
    best_x, best_val = float(grid[i]), float(values[i])

    if 1 < i < len(grid) - 1:
        # refine in u = ln x between the neighbours (grid[0] is the zero point)
        lo, hi = math.log(grid[i - 1]), math.log(grid[i + 1])
        u_ref = _golden_max(lambda u: float(payoff(math.exp(u))), lo, hi, settings.refine_tol)
        x_ref = math.exp(u_ref)
        v_ref = float(payoff(x_ref))
        if v_ref > best_val:
            best_x, best_val = x_ref, v_ref
    return best_x, best_val


def verify_equilibrium(
    params: ContestParams, rule: PrizeRule, settings: ScanSettings = ScanSettings()
) -> VerificationReport:
    """Confirm, refute, or leave undetermined that the candidate is an equilibrium."""
    cand = candidate_equilibrium(params, rule)
    suff = sufficient_condition(params.n, params.r)
    nec = necessary_payoff(params, rule)
    notes = []

    if cand.spread == 0.0:
        # constant prize: zero effort is strictly dominant for both players
        zero = (0.0, cand.payoff_A), (0.0, cand.payoff_B)
        return VerificationReport(suff, nec, nec >= 0, math.nan, math.nan, zero[0], zero[1],
                                  CONFIRMED, cand, unique=suff, notes=["constant prize; zero effort dominant"])

    slope_A = float(slope_G(params, rule, "A", cand.x_B, cand.x_A))
    slope_B = float(slope_G(params, rule, "B", cand.x_A, cand.x_B))
    br_A = global_best_response(params, rule, "A", cand.x_B, settings, anchor=cand.x_A)
    br_B = global_best_response(params, rule, "B", cand.x_A, settings, anchor=cand.x_B)

    gains = (br_A[1] - cand.payoff_A, br_B[1] - cand.payoff_B)
    at_candidate = all(
        abs(math.log(br[0]) - math.log(x)) <= LOCATION_TOL if br[0] > 0 else False
        for br, x in ((br_A, cand.x_A), (br_B, cand.x_B))
    )
    if max(gains) > IMPROVEMENT_TOL:
        verdict = REFUTED
        for who, g, br in (("A", gains[0], br_A), ("B", gains[1], br_B)):
            if g > IMPROVEMENT_TOL:
                notes.append(f"player {who} improves by {g:.3g} at effort {br[0]:.6g}")
    elif at_candidate and nec >= 0:
        verdict = CONFIRMED
    else:
        verdict = UNDETERMINED
        notes.append("scan inconclusive at resolution")

    if nec < 0 and verdict != REFUTED:
        notes.append("necessary condition fails but no deviation found by scan")
    if not suff and verdict != REFUTED:
        notes.append("r above 2/(n+1): no general existence guarantee for this rule")
    unique = suff and verdict == CONFIRMED
    if unique:
        notes.append("unique equilibrium (r <= 2/(n+1))")
    return VerificationReport(
        sufficient_ok=suff,
        necessary_payoff_B=nec,
        necessary_ok=nec >= 0,
        slope_A_at_candidate=slope_A,
        slope_B_at_candidate=slope_B,
        global_br_A=br_A,
        global_br_B=br_B,
        is_equilibrium=verdict,
        candidate=cand,
        unique=unique,
        notes=notes,
    )


def majority_iff_exists(params: ContestParams) -> bool:
    """Existence under simple majority with odd ``n``: the weak player's candidate payoff is >= 0."""
    if params.n % 2 == 0:
        raise DomainError("the majority-rule criterion is stated for odd n only")
    return necessary_payoff(params, majority_rule(params.n)) >= 0


def averaging_gain(
    params: ContestParams,
    rule: PrizeRule,
    opponent_uniform_effort: float,
    own_profile: Sequence[float],
    battles: tuple[int, int],
    player: Player = "B",
) -> float:
    """Payoff change from replacing efforts in two battles by their mean."""
    own = np.array(own_profile, dtype=float)
    if own.shape != (params.n,):
        raise StructuralError(f"profile must have length n={params.n}")
    k, l = battles
    after = own.copy()
    after[k] = after[l] = 0.5 * (own[k] + own[l])
    other = np.full(params.n, float(opponent_uniform_effort))

    def pay(profile):
        if player == "A":
            return profile_payoff(params, rule, profile, other, "A")
        return profile_payoff(params, rule, other, profile, "B")

    return pay(after) - pay(own)
