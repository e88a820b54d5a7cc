"""
Checking the formulas by simulation
===================================

Simulate each sub-queue and set the estimates beside the closed forms.
The transport queue is the interesting one: its service is not
exponential, and the simulated customers per busy period land on e^rho
rather than on the cv-based approximation.
"""

import math

from infserv import repair, sim
from infserv.dist import Deterministic, Exponential

sc = repair.RepairScenario(0.25, 0.3, 0.9, Exponential(1.0), Exponential(1.0), Deterministic(1.0))
analytic = repair.evaluate(sc)
simulated = sim.simulate_subqueues(sc, replications=4000, seed=11)

for label in repair.LABELS:
    m, est = analytic[label], simulated[label]
    eb, r, nb = (est[k] for k in sim.METRICS)
    print(f"\n{label}  (rho {m.rho:.4f})")
    print(f"  E[B]  formula {m.mean_busy_period:.4f}   sim {eb.point:.4f} +/- {eb.ci_half_width:.4f}")
    print(f"  R(52) bounds [{m.r_lower:.3f}, {m.r_upper:.3f}]   sim {r.point:.3f} +/- {r.ci_half_width:.3f}")
    print(f"  N_B   table {m.customers_per_bp:.4f}  e^rho {math.exp(m.rho):.4f}   sim {nb.point:.4f} +/- {nb.ci_half_width:.4f}")
