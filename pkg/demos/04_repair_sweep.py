"""
Sweeping the transport probability
==================================

Evaluate the global, base, station and transport queues while moving
repairs from the base to the remote station.
"""

import json
from pathlib import Path

from infserv import repair

sc, ps = repair.scenario_from_dict(json.loads((Path(__file__).parent / "data" / "repair_scenario.json").read_text()))

for label in ("global", "station", "transport"):
    print(f"\n{label}")
    print("  p    E[B]  R lower  R upper   N_B")
    for row in repair.sweep(sc, ps):
        m = row[label]
        print(f"{row.p:4.1f} {m.mean_busy_period:6.2f} {m.r_lower:8.2f} {m.r_upper:8.2f} {m.customers_per_bp:6.3f}")

base = repair.evaluate(sc)["base"]
print(f"\nbase (any p): E[B] {base.mean_busy_period:.2f}, R in [{base.r_lower:.2f}, {base.r_upper:.2f}], N_B {base.customers_per_bp:.2f}")
print(f"global service cv at p={sc.p}: {repair.global_cv(sc):.4f}")
