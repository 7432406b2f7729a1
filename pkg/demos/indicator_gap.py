"""
Where the largest tree lives
============================

The ratio E(tau_n,1)/E(mu_n) counts the largest tree even when it sits
outside the largest component.  The vertex-level conditional probability
only counts it when it is inside.  The gap between the two forms is the
mass of the largest tree lying elsewhere, and it does not shrink with n.
"""

from fractions import Fraction

from mapstat import montecarlo as mc
from mapstat.exact import enumerate_all
from mapstat.sampling import RandomStream

# exact gap for small n
for n in range(2, 8):
    t = enumerate_all(n, s_max=1, r_max=1)
    gap = (t.mean_tau[0] - t.mean_tau_in_largest[0]) / t.mean_mu
    print(f"n={n}: exact gap {float(gap):.4f}  ({Fraction(gap)})")

# simulated gap for larger n, shared draws per n
for row in mc.gap_report([100, 1000, 5000], 3000, RandomStream(3)):
    g = row["gap"]
    print(f"n={row['n']}: gap {g['point']:.4f} +- {g['std_error']:.4f}, "
          f"indicator form {row['indicator_form']['point']:.4f}, ratio form {row['ratio_form']['point']:.4f}")
