"""
Costs and failure logs
======================

Price a cut in the transport probability, then estimate the arrival
parameters from a synthetic failure log.
"""

import numpy as np

from infserv import cost
from infserv.repair import fit_scenario_from_log

plan = cost.CostInputs(cost_per_year=1000.0, p_initial=0.9, delta_p=0.18, investment_per_year=150.0)
saving = cost.differential_cost(plan)
print(f"yearly saving {saving.delta_cost_per_year:.2f}, remaining transport cost {saving.final_cost_per_year:.2f}")
v = cost.investment_viable(plan)
print(f"investment viable: {v.viable} (margin {v.margin_per_year:.2f} per year)")

# ten years of failures at one per four weeks
rng = np.random.default_rng(3)
n = rng.poisson(0.25 * 520)
times = np.sort(rng.uniform(0.0, 520.0, n))
station = rng.random(n) < 0.3
events = [(t, "station" if s else "base", bool(s and rng.random() < 0.9)) for t, s in zip(times, station)]

fit = fit_scenario_from_log(events)
pc = fit.poisson
print(f"\nlambda {fit.lam:.4f}/week, q {fit.q:.3f}, p {fit.p:.3f}")
print(f"dispersion index {pc.dispersion_index:.3f}, chi2 {pc.chi2:.1f} on {pc.df} df, p-value {pc.p_value:.3f}")
