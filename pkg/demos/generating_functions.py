"""
Distributions from generating functions
=======================================

The tree function T(x) and the connected-mapping series log(1/(1 - T(x)))
give the distribution of the largest component and largest tree for any n.
Rational mode is exact; float mode rescales coefficients so that large n
stays in range.
"""

from mapstat import series as ser

# exact rationals for a small case
print("P(mu_6 <= m):", [str(p) for p in ser.component_cdf_table(6, 1)])
print("P(tau_6,1 <= m):", [str(p) for p in ser.tree_cdf_table(6, 1)])

# the same quantities in float mode for a larger n
n = 500
print(f"E(mu_{n})/n     = {ser.exact_expectation_mu(n, 'float') / n:.8f}")
print(f"E(tau_{n},1)/n  = {ser.exact_expectation_tau(n, 1, 'float') / n:.8f}")
print(f"P(mu_{n} <= n/2) = {ser.largest_component_cdf(n, n // 2, 'float'):.8f}")

# a whole curve of E(mu_n)/n for every n up to N in one sweep
curve = ser.expectation_curve("mu", 1000)
print("E(mu_n)/n at n = 10, 100, 1000:", curve[10], curve[100], curve[1000])
