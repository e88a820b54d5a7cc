"""
Busy periods of one infinite-server queue
=========================================

Mean busy period, bounds on the expected number of busy periods started
in a horizon, and customers served per busy period, as traffic grows.
"""

import numpy as np

from infserv import busy

lam, horizon = 0.5, 52.0
print(" mean   rho   E[B]   R lower  R upper  N_B(exp)  N_B(cv=0.5)")
for alpha in np.array([0.2, 0.5, 1.0, 2.0, 4.0]):
    rho = busy.traffic_intensity(lam, alpha)
    lo, hi = busy.busy_period_count_bounds(lam, alpha, horizon)
    print(
        f"{alpha:5.1f} {rho:5.2f} {busy.mean_busy_period(lam, alpha):6.2f} {lo:8.2f} {hi:8.2f}"
        f" {busy.customers_per_bp_exponential(rho):9.3f} {busy.customers_per_bp_general(rho, 0.5):11.3f}"
    )

# Heavier traffic gives longer, rarer busy periods. The upper bound on R
# ignores the traffic entirely; the lower bound shrinks by e^-rho.
