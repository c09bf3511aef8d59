"""Which prize split gets the most total effort?

Total effort is linear in the shares, so the best rule sits on a vertex: the
winner of at least T battles takes all, anything closer is split evenly.
"""
import numpy as np

from multicontest.design import brute_force_optimal, g_values, optimal_rule, sweep_threshold
from multicontest.rules import ContestParams

# symmetric players: simple majority is optimal
out = optimal_rule(ContestParams(5, 0.3, 1.0, 1.0))
print("symmetric, n=5   T =", out.threshold_T, " shares", out.rule.shares)

# a strong favourite needs a full sweep before the prize moves
params = ContestParams.from_baseline(5, 0.3, 0.9)
print("g profile at p=0.9:", np.round(g_values(5, 0.9), 4))
out = optimal_rule(params)
print("favourite, n=5   T =", out.threshold_T, " margin", out.margin, " TE", round(out.total_effort, 6))

# the enumeration oracle agrees
rule, te = brute_force_optimal(params)
print("brute force      shares", rule.shares, " TE", round(te, 6))

# even n: the 2-2 tie is split
print("symmetric, n=4  ", optimal_rule(ContestParams(4, 0.4, 1, 1)).rule.shares)

# threshold grows with the favourite's edge
print("\n  p     T (n=11)")
for p, T in sweep_threshold(11, np.linspace(0.5, 0.95, 10)):
    print(f"{p:.2f}   {T}")
