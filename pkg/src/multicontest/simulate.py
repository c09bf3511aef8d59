"""Seeded Monte Carlo simulation of full contests.

Random stream: numpy ``PCG64`` seeded with the integer seed, consumed as
``Generator.random`` doubles in trial-major, battle-minor order.  Player A wins
battle ``j`` of a trial when its uniform draw is below A's win probability in
that battle.  Chunking does not change the stream, so any chunk size yields the
same summary.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .binomial import pmf_vector
from .equilibrium import EquilibriumSolution, battle_win_prob, _check_rule
from .errors import DomainError, StructuralError
from .rules import ContestParams, PrizeRule

MAX_TRIALS = 10**8
CHUNK = 1 << 16


@dataclass
class SimulationSummary:
    trials: int
    seed: int
    win_counts_A: np.ndarray
    mean_battles_won_A: float
    empirical_prize_A: float
    empirical_payoff_A: float
    empirical_payoff_B: float
    per_battle_freq_A: np.ndarray
    co_wins_A: np.ndarray | None = None

    def battle_correlations(self) -> np.ndarray:
        """Pearson correlation of battle-win indicators (needs ``track_pairs=True``)."""
        if self.co_wins_A is None:
            raise ValueError("simulation ran without track_pairs")
        f = self.per_battle_freq_A
        cov = self.co_wins_A / self.trials - np.outer(f, f)
        sd = np.sqrt(f * (1.0 - f))
        with np.errstate(divide="ignore", invalid="ignore"):
            return cov / np.outer(sd, sd)


@dataclass
class EmpiricalReport:
    z_per_battle: np.ndarray
    z_mean_battles: float
    chi2: float
    chi2_dof: int
    chi2_pvalue: float
    z_payoff_A: float
    z_payoff_B: float

    def max_abs_z(self) -> float:
        zs = np.concatenate([self.z_per_battle, [self.z_mean_battles, self.z_payoff_A, self.z_payoff_B]])
        return float(np.max(np.abs(zs)))


@dataclass
class _Accumulator:
    n: int
    hist: np.ndarray
    per_battle: np.ndarray
    co: np.ndarray | None

    @classmethod
    def empty(cls, n, track_pairs):
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.zeros(n, dtype=np.int64),
                   np.zeros((n, n), dtype=np.int64) if track_pairs else None)

    def merge(self, other):
        self.hist += other.hist
        self.per_battle += other.per_battle
        if self.co is not None:
            self.co += other.co


def _run(p_A: np.ndarray, trials: int, seed, track_pairs: bool) -> _Accumulator:
    n = len(p_A)
    rng = np.random.Generator(np.random.PCG64(seed))
    acc = _Accumulator.empty(n, track_pairs)
    done = 0
    while done < trials:
        m = min(CHUNK, trials - done)
        wins = rng.random((m, n)) < p_A
        acc.hist += np.bincount(wins.sum(axis=1), minlength=n + 1)
        acc.per_battle += wins.sum(axis=0)
        if track_pairs:
            w = wins.astype(np.int64)
            acc.co += w.T @ w
        done += m
    return acc


def simulate_contest(
    params: ContestParams,
    rule: PrizeRule,
    efforts_A: Sequence[float],
    efforts_B: Sequence[float],
    trials: int,
    seed: int,
    *,
    partitions: int = 1,
    workers: int | None = None,
    track_pairs: bool = False,
) -> SimulationSummary:
    """Simulate ``trials`` independent contests at fixed pure effort profiles.

    With ``partitions > 1`` the trials are split into contiguous blocks, each
    driven by ``SeedSequence(seed).spawn(partitions)[i]``; the merged result is
    the same whether the blocks run serially or on ``workers`` threads.
    """
    _check_rule(params, rule)
    if trials < 1 or trials > MAX_TRIALS:
        raise DomainError(f"trials must lie in [1, {MAX_TRIALS}]")
    if seed < 0:
        raise DomainError("seed must be non-negative")
    xa = np.asarray(efforts_A, dtype=float)
    xb = np.asarray(efforts_B, dtype=float)
    if xa.shape != (params.n,) or xb.shape != (params.n,):
        raise StructuralError(f"effort profiles must have length n={params.n}")
    p_A = np.atleast_1d(battle_win_prob(xa, xb, params.r))

    if partitions == 1:
        acc = _run(p_A, trials, seed, track_pairs)
    else:
        subs = np.random.SeedSequence(seed).spawn(partitions)
        sizes = [trials // partitions + (i < trials % partitions) for i in range(partitions)]
        jobs = [(p_A, s, sub, track_pairs) for s, sub in zip(sizes, subs) if s > 0]
        if workers and workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                parts = list(pool.map(lambda a: _run(*a), jobs))
        else:
            parts = [_run(*a) for a in jobs]
        acc = parts[0]
        for part in parts[1:]:
            acc.merge(part)

    n = params.n
    k = np.arange(n + 1)
    v = rule.values
    prize_A = float(acc.hist @ v / trials)
    prize_B = float(acc.hist @ v[n - k] / trials)
    return SimulationSummary(
        trials=trials,
        seed=seed,
        win_counts_A=acc.hist,
        mean_battles_won_A=float(acc.hist @ k / trials),
        empirical_prize_A=prize_A,
        empirical_payoff_A=float(prize_A - params.c_A * xa.sum()),
        empirical_payoff_B=float(prize_B - params.c_B * xb.sum()),
        per_battle_freq_A=acc.per_battle / trials,
        co_wins_A=acc.co,
    )


def _z(observed, expected, var, trials):
    se = np.sqrt(var / trials)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, (observed - expected) / np.where(se > 0, se, 1.0),
                     np.where(np.isclose(observed, expected, rtol=0, atol=1e-12), 0.0, np.inf))
    return z


def _pooled(observed, expected, min_expected=5.0):
    """Merge adjacent bins until each has at least ``min_expected`` expected counts."""
    obs_out, exp_out = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= min_expected:
            obs_out.append(o_acc)
            exp_out.append(e_acc)
            o_acc = e_acc = 0.0
    if e_acc > 0 or o_acc > 0:
        if exp_out:
            obs_out[-1] += o_acc
            exp_out[-1] += e_acc
        else:
            obs_out.append(o_acc)
            exp_out.append(e_acc)
    return np.array(obs_out), np.array(exp_out)


def empirical_check(summary: SimulationSummary, analytic: EquilibriumSolution, rule: PrizeRule) -> EmpiricalReport:
    """Compare a simulation at the candidate efforts with the analytic predictions."""
    n = rule.n
    N = summary.trials
    p = analytic.p_A
    z_battle = _z(summary.per_battle_freq_A, p, p * (1.0 - p), N)
    z_mean = float(_z(summary.mean_battles_won_A, n * p, n * p * (1.0 - p), N))

    theta = pmf_vector(n, p)
    obs, exp = _pooled(summary.win_counts_A.astype(float), theta * N)
    if len(obs) > 1:
        chi2, pval = stats.chisquare(obs, exp * obs.sum() / exp.sum())
        dof = len(obs) - 1
    else:
        chi2, pval, dof = 0.0, 1.0, 0

    v = rule.values
    k = np.arange(n + 1)
    prize_A = theta @ v
    var_A = theta @ v**2 - prize_A**2
    prize_B = theta @ v[n - k]
    var_B = theta @ v[n - k] ** 2 - prize_B**2
    z_pay_A = float(_z(summary.empirical_payoff_A, analytic.payoff_A, var_A, N))
    z_pay_B = float(_z(summary.empirical_payoff_B, analytic.payoff_B, var_B, N))
    return EmpiricalReport(z_battle, z_mean, float(chi2), dof, float(pval), z_pay_A, z_pay_B)
