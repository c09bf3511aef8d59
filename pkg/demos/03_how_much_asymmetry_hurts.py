"""Under simple majority, how large can r be before a pure equilibrium may fail?

With equal costs the bound is 2^n / (n C(n-1, (n-1)/2)); once costs may differ
arbitrarily it drops to 2/(n+1).
"""
from multicontest.design import existence_bounds
from multicontest.rules import ContestParams, majority_rule
from multicontest.verification import majority_iff_exists, necessary_payoff

print("   n   symmetric  asymmetric  ratio")
for n in (3, 5, 7, 9, 11, 21, 31, 51, 101):
    s, a, ratio = existence_bounds(n)
    print(f"{n:4d}   {s:.4f}     {a:.4f}     {ratio:.3f}")

# just above the asymmetric bound, a lopsided cost ratio breaks existence
for p_B in (0.4, 0.1, 0.01):
    params = ContestParams.from_weak_baseline(5, 0.4, p_B, 1.0)
    print(f"n=5 r=0.4 p_B={p_B:<5} c_B/c_A={params.c_B:10.4g}  pi_B*={necessary_payoff(params, majority_rule(5)):+.3e}"
          f"  exists={majority_iff_exists(params)}")
