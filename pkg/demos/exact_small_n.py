"""
Exhaustive enumeration
======================

For small n all n**n mappings can be visited, which gives every statistic
as an exact fraction.  These tables are the ground truth for the other
methods.
"""

from mapstat.exact import enumerate_all

for n in range(1, 7):
    t = enumerate_all(n, s_max=2, r_max=1)
    print(f"n={n}: E(mu)={t.mean_mu}, E(tau_1)={t.mean_tau[0]}, "
          f"P(t_1 in m)={t.subgraph_prob[0]}, conditional p_1={t.conditional[0]}, "
          f"connected mappings={t.connected_count}")

# the full distribution of the largest component at n = 5
t = enumerate_all(5)
for size, p in enumerate(t.mu_dist[0]):
    if p:
        print(f"P(mu_5 = {size}) = {p}")
