"""Acceptance gate for the repair example.

Each criterion records one PASS/FAIL line (see the terminal summary) and then
asserts. Reference tables below are the expected figures for the two-site
repair example; derived references are computed independently of the package.
"""
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate, stats

from infserv import busy, cost, net, repair, sim
from infserv.cli import compare_rows

from .conftest import ACCEPTANCE_LINES, P_SWEEP, example_scenario

ROOT = Path(__file__).resolve().parents[1]
SEED = 2024
REPS = 10_000
ORACLE_P = (0.9, 0.5, 0.1)

# reference tables, rows p = 0.9 ... 0.1
STATION = [
    (1.00, 1.38, 1.39, 1.01),
    (1.01, 1.75, 1.78, 1.02),
    (1.01, 2.12, 2.17, 1.02),
    (1.02, 2.48, 2.56, 1.03),
    (1.02, 2.84, 2.95, 1.04),
    (1.02, 3.19, 3.34, 1.05),
    (1.03, 3.54, 3.73, 1.05),
    (1.03, 3.88, 4.12, 1.06),
    (1.03, 4.22, 4.51, 1.07),
]
TRANSPORT_123 = [
    (2.14, 3.94, 4.51),
    (2.12, 3.65, 4.12),
    (2.11, 3.36, 3.73),
    (2.09, 3.05, 3.34),
    (2.08, 2.74, 2.95),
    (2.06, 2.41, 2.56),
    (2.05, 2.07, 2.17),
    (2.03, 1.73, 1.78),
    (2.02, 1.37, 1.39),
]
TRANSPORT_NB_PRINTED = [3.49, 3.13, 2.81, 2.54, 2.30, 2.10, 1.91, 1.76, 1.62]
# cv 0.5 approximation, evaluated with 30-digit arithmetic before the code existed
TRANSPORT_NB_CV05 = [
    1.636576209,
    1.620364597,
    1.604422819,
    1.588746159,
    1.573329985,
    1.558169748,
    1.54326098,
    1.528599293,
    1.514180377,
]
GLOBAL = [
    (1.51, 10, 14, 2.04),
    (1.45, 10, 14, 2.03),
    (1.40, 10, 14, 2.02),
    (1.40, 10, 14, 2.03),
    (1.35, 10, 14, 2.02),
    (1.29, 11, 14, 2.01),
    (1.24, 11, 14, 1.99),
    (1.24, 11, 14, 2.00),
    (1.19, 11, 14, 1.99),
]
BASE = (1.09, 8.48, 10.1, 1.19)


def verdict(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def cols(m):
    return (m.mean_busy_period, m.r_lower, m.r_upper, m.customers_per_bp)


def test_criterion_1_station_table():
    t0 = time.perf_counter()
    rows = repair.sweep(example_scenario(), P_SWEEP)
    elapsed = time.perf_counter() - t0
    bad = [
        (r.p, j, round(got, 4), want)
        for r, ref in zip(rows, STATION)
        for j, (got, want) in enumerate(zip(cols(r["station"]), ref))
        if abs(got - want) > 0.01
    ]
    verdict(1, not bad and elapsed < 1.0, f"36 cells, {len(bad)} off by > 0.01, {elapsed * 1000:.1f} ms")


def test_criterion_2_transport_table():
    rows = repair.sweep(example_scenario(), P_SWEEP)
    bad = [
        (r.p, j, round(got, 4), want)
        for r, ref in zip(rows, TRANSPORT_123)
        for j, (got, want) in enumerate(zip(cols(r["transport"])[:3], ref))
        if abs(got - want) > 0.01
    ]
    bad_nb = [
        (r.p, r["transport"].customers_per_bp, want)
        for r, want in zip(rows, TRANSPORT_NB_CV05)
        if abs(r["transport"].customers_per_bp - want) > 0.01
    ]
    # the comparison report must carry the discrepancy for the printed column
    _, notes, _ = compare_rows(example_scenario(), [0.9], reps=40, seed=SEED)
    documented = any("transport" in n and "cv-based N_B approximation 1.6366" in n for n in notes)
    printed_gap = max(abs(a - b) for a, b in zip(TRANSPORT_NB_CV05, TRANSPORT_NB_PRINTED))
    verdict(
        2,
        not bad and not bad_nb and documented,
        f"cols 1-3: {len(bad)} off; N_B vs cv-0.5 list: {len(bad_nb)} off; "
        f"printed N_B column differs by up to {printed_gap:.2f} (documented in compare: {documented})",
    )


def test_criterion_3_global_table():
    rows = repair.sweep(example_scenario(), P_SWEEP)
    bad = []
    for r, (eb, lo, hi, nb) in zip(rows, GLOBAL):
        m = r["global"]
        if abs(m.mean_busy_period - eb) > 0.03 * eb:
            bad.append((r.p, "E[B]", m.mean_busy_period, eb))
        if abs(m.r_lower - lo) > 1 or abs(m.r_upper - hi) > 1:
            bad.append((r.p, "bounds", (m.r_lower, m.r_upper), (lo, hi)))
        if abs(m.customers_per_bp - nb) > 0.015:
            bad.append((r.p, "N_B", m.customers_per_bp, nb))
    worst = max(abs(r["global"].mean_busy_period / ref[0] - 1) for r, ref in zip(rows, GLOBAL))
    verdict(3, not bad, f"{len(bad)} cells outside tolerance; worst E[B] relative gap {worst:.2%}")


def test_criterion_4_base_figures():
    rows = repair.sweep(example_scenario(), P_SWEEP)
    first = cols(rows[0]["base"])
    off = [(got, want) for got, want in zip(first, BASE) if abs(got - want) > 0.01]
    constant = all(cols(r["base"]) == first for r in rows)
    verdict(4, not off and constant, f"values {tuple(round(v, 3) for v in first)}, constant across p: {constant}")


def _closed_form(p, s, q=0.3):
    g_exp = 1.0 / (1.0 + s)
    return (1 - q) * g_exp + (1 - p) * q * g_exp + p * q * g_exp * math.exp(-s)


def test_criterion_5_transform_equivalence():
    grid = np.linspace(0.0, 10.0, 20)
    worst = 0.0
    for p in (0.0, 0.1, 0.5, 0.9, 1.0):
        spec = repair.build_network(example_scenario(p))
        for s in grid:
            worst = max(worst, abs(net.sojourn_lt(spec, float(s)) - _closed_form(p, float(s))))
    verdict(5, worst <= 1e-12, f"100 points, max |difference| {worst:.2e}")


@pytest.fixture(scope="module")
def oracle_run():
    t0 = time.perf_counter()
    out = {p: sim.simulate_subqueues(example_scenario(p), REPS, SEED) for p in ORACLE_P}
    return out, time.perf_counter() - t0


def test_criterion_6_oracle_coverage(oracle_run):
    results, elapsed = oracle_run
    misses = []
    for p in ORACLE_P:
        sc = example_scenario(p)
        analytic = repair.evaluate(sc)
        for label, sq in repair.sub_queues(sc).items():
            est, m = results[p][label], analytic[label]
            if not est["mean_busy_period"].covers(m.mean_busy_period):
                misses.append(f"E[B] {label} p={p}")
            if label != "global" and sq.service.is_exponential():
                if not est["customers_per_bp"].covers(math.exp(m.rho)):
                    misses.append(f"N_B {label} p={p}")
            r = est["busy_period_starts"].point
            if not m.r_lower <= r <= m.r_upper:
                misses.append(f"R {label} p={p} ({r:.4f} < {m.r_lower:.4f})")
    verdict(
        6,
        not misses and elapsed < 60,
        f"{REPS} reps, seed {SEED}, {elapsed:.1f} s; misses: {', '.join(misses) or 'none'}",
    )


# supplementary oracle checks: not acceptance criteria, reported for context


def _cdf(label, u):
    exp1 = -np.expm1(-u)
    shifted = np.where(u >= 1.0, -np.expm1(-(u - 1.0)), 0.0)
    return {"base": exp1, "station": exp1, "transport": shifted}[label]


def exact_bp_starts(lam, label, t):
    """Expected busy-period starts in [0, t] given one starts at 0."""
    u = np.linspace(0.0, t, 520_001)
    g = _cdf(label, u)
    tail = integrate.cumulative_trapezoid(1.0 - g, u, initial=0.0)
    return 1.0 + lam * integrate.trapezoid(g * np.exp(-lam * tail), u)


def test_supplementary_r_matches_exact_value(oracle_run):
    results, _ = oracle_run
    misses = []
    for p in ORACLE_P:
        for label, sq in repair.sub_queues(example_scenario(p)).items():
            if label == "global":
                continue
            exact = exact_bp_starts(sq.lam, label, 52.0)
            lo, hi = busy.busy_period_count_bounds(sq.lam, sq.service.moments().mean, 52.0)
            assert lo <= exact <= hi
            if not results[p][label]["busy_period_starts"].covers(exact):
                misses.append((p, label))
    ACCEPTANCE_LINES.append(f"supplementary: simulated R(52) CIs vs exact values, misses {misses or 'none'}")
    assert not misses


def test_supplementary_bonferroni_busy_period(oracle_run):
    results, _ = oracle_run
    cells = [(p, label) for p in ORACLE_P for label in repair.LABELS]
    z = stats.norm.ppf(1 - 0.05 / (2 * len(cells)))
    misses = []
    for p, label in cells:
        est = results[p][label]["mean_busy_period"]
        truth = repair.evaluate(example_scenario(p))[label].mean_busy_period
        if abs(est.point - truth) > est.ci_half_width * z / sim.Z95:
            misses.append((p, label))
    ACCEPTANCE_LINES.append(f"supplementary: E[B] with family-wise 95% intervals ({len(cells)} cells), misses {misses or 'none'}")
    assert not misses


def test_criterion_7_property_suites():
    files = ["test_dist.py", "test_net.py", "test_repair.py", "test_cost.py", "test_sim.py", "test_cli.py"]
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-m", "not slow", "-p", "no:cacheprovider", *files],
        cwd=ROOT / "tests",
        capture_output=True,
        text=True,
    )
    elapsed = time.perf_counter() - t0
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    verdict(7, proc.returncode == 0 and elapsed < 10, f"{tail}; wall {elapsed:.1f} s")


def test_criterion_8_cost_examples():
    c = cost.CostInputs(1000.0, 0.9, 0.18, investment_per_year=200.0)
    dc = cost.differential_cost(c).delta_cost_per_year
    v = cost.investment_viable(c)
    verdict(8, dc == 200.0 and v.viable and v.margin_per_year == 0.0, f"delta c = {dc!r}, k = delta c viable: {v.viable}")
