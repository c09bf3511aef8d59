"""Monte Carlo check of the analytic outcome distribution.

Battles are independent given the efforts, so the number of battles A wins is
binomial at the candidate equilibrium.
"""
import numpy as np

from multicontest.binomial import pmf_vector
from multicontest.equilibrium import candidate_equilibrium
from multicontest.rules import ContestParams, majority_rule
from multicontest.simulate import empirical_check, simulate_contest

params = ContestParams(3, 0.5, 1.0, 2.0)
rule = majority_rule(3)
sol = candidate_equilibrium(params, rule)

summ = simulate_contest(params, rule, [sol.x_A] * 3, [sol.x_B] * 3, trials=10**6, seed=42)
print("wins by A      simulated   expected")
for k, (obs, exp) in enumerate(zip(summ.win_counts_A, pmf_vector(3, sol.p_A) * summ.trials)):
    print(f"{k:9d}   {obs:9d}   {exp:10.1f}")

chk = empirical_check(summ, sol, rule)
print("per-battle z:", np.round(chk.z_per_battle, 3), " chi2 p-value:", round(chk.chi2_pvalue, 4))
print("payoff A: simulated", round(summ.empirical_payoff_A, 5), "analytic", round(sol.payoff_A, 5))

# the same seed split over four sub-streams, run on threads
split = simulate_contest(params, rule, [sol.x_A] * 3, [sol.x_B] * 3, 10**6, 42, partitions=4, workers=4)
print("partitioned run:", split.win_counts_A)
