"""
Monte Carlo estimates
=====================

Uniform random mappings are drawn from a counter-based stream, so a seed
fixes every draw regardless of how many workers share the work.
"""

from mapstat import montecarlo as mc
from mapstat.sampling import RandomStream

n, trials = 2000, 4000
d = mc.draw(n, trials, RandomStream(seed=1), s_max=3, r_max=2)

# moments of the extremal sizes, scaled by n
m = mc.moments(d)
print(f"E(mu_n)/n    ~ {m.mean_mu_over_n.point:.4f} +- {m.mean_mu_over_n.std_error:.4f}")
for s, e in enumerate(m.mean_tau_over_n, start=1):
    print(f"E(tau_n,{s})/n ~ {e.point:.4f} +- {e.std_error:.4f}")

# all estimators below reuse the same draws
for s in (1, 2, 3):
    cond, ratio = mc.conditional_ps(d, s), mc.ratio_ps(d, s)
    print(f"s={s}: conditional {cond.point:.4f}, ratio of means {ratio.point:.4f}, "
          f"P(t_s inside m) {mc.subgraph_prob(d, s).point:.4f}")

direct, moment = mc.pair_conditional(d)
print(f"two vertices in m also share the largest tree: {direct.point:.4f} (moment form {moment.point:.4f})")
