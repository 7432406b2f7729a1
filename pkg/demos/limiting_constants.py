"""
Extrapolating the limiting constants
====================================

E(mu_n)/n and E(tau_n,s)/n approach constants c and c_s.  Fitting
a + b n**-1/2 + c' n**-1 to exact values on a grid of n recovers them.
A small grid keeps this quick; the CLI default grid ends at 4096.
"""

from mapstat import series as ser
from mapstat.reference import CONDITIONAL_LIMITS, FLAJOLET_ODLYZKO, TREE_CONSTANTS

grid = [128, 256, 512, 1024]
mu_fit, tau_fits, ps = ser.extrapolate_ps(grid, (1, 2, 3, 4))

print(f"c   = {mu_fit.limit_estimate:.7f}  (published {FLAJOLET_ODLYZKO})")
for s, fit in tau_fits.items():
    print(f"c_{s} = {fit.limit_estimate:.7f}  (published {TREE_CONSTANTS[s]}),  "
          f"p_{s} = c_{s}/c = {ps[s]:.7f}  (published {CONDITIONAL_LIMITS[s]})")
