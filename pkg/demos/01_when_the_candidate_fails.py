"""Twenty battles, strong discriminatory power, a wide tie margin.

The first-order conditions give a candidate profile, but the weak player's
payoff has a second, higher peak.  This script walks through the numbers.
"""
import numpy as np

from multicontest.equilibrium import candidate_equilibrium, uniform_payoff
from multicontest.rules import ContestParams, tie_margin_rule
from multicontest.verification import slope_G, verify_equilibrium

params = ContestParams(n=20, r=0.8, c_A=1.0, c_B=1.5)
rule = tie_margin_rule(20, 17)   # win 17 of 20 to take everything
print("shares:", rule.shares)

sol = candidate_equilibrium(params, rule)
print(f"baseline win prob of A  {sol.p_A:.4f}")
print(f"effective prize spread  {sol.spread:.6f}")
print(f"candidate efforts       x_A={sol.x_A:.6f}  x_B={sol.x_B:.6f}")

# r is far above 2/21, so no general guarantee applies; look at the local slopes
print("G' for A at candidate:", round(float(slope_G(params, rule, "A", sol.x_B, sol.x_A)), 3))
print("G' for B at candidate:", round(float(slope_G(params, rule, "B", sol.x_A, sol.x_B)), 3))

# A positive G' for A means the candidate is a local *minimum* of A's payoff
mult = np.array([0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0])
pay_A = uniform_payoff(params, rule, sol.x_A * mult, sol.x_B, "A")
pay_B = uniform_payoff(params, rule, sol.x_A, sol.x_B * mult, "B")
print("\n multiple   payoff A    payoff B")
for m, a, b in zip(mult, pay_A, pay_B):
    print(f"{m:9.2f}  {a:9.5f}  {b:9.5f}")

rep = verify_equilibrium(params, rule)
print("\nverdict:", rep.is_equilibrium)
print("B's best uniform reply:", rep.global_br_B, "vs candidate payoff", round(sol.payoff_B, 6))
print("notes:", rep.notes)
