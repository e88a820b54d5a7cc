"""Command-line front end.

    infserv analyze  NETWORK.json
    infserv sweep    SCENARIO.json
    infserv simulate --scenario FILE --queue {global,base,station,transport,network}
    infserv compare  SCENARIO.json --reps N
    infserv cost     --ci C --pi P --dp DP --k K
    infserv fit      LOG.csv

Exit codes: 0 success, 1 numeric failure or a gating comparison not covered,
2 usage or input error.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from pathlib import Path
from typing import Sequence

from . import busy, cost, net, repair, sim
from .files import InputError, is_network, load_json, load_network, load_scenario, read_failure_log
from .report import Report, file_digest, fixed, render_many, sig, write_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _p_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad probability list {text!r}") from None
    if not vals or any(not 0 <= v <= 1 for v in vals):
        raise argparse.ArgumentTypeError(f"probabilities must lie in [0, 1]: {text!r}")
    return vals


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("text", "csv", "json"), default="text")
    common.add_argument("--out-dir", type=Path, default=None, help="directory for CSV files")
    common.add_argument("--horizon", type=float, default=None, help="horizon in weeks")
    common.add_argument("--seed", type=int, default=2024)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="infserv", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="equivalent M|G|inf queue of a network")
    a.add_argument("network", type=Path)

    s = sub.add_parser("sweep", parents=[common], help="busy-period tables over p")
    s.add_argument("scenario", type=Path)
    s.add_argument("--p", type=_p_list, default=None, help="comma-separated p values")

    m = sub.add_parser("simulate", parents=[common], help="Monte Carlo busy-period estimates")
    m.add_argument("--scenario", type=Path, required=True)
    m.add_argument("--reps", type=int, default=1000)
    m.add_argument(
        "--queue", choices=("global", "base", "station", "transport", "network"), default="global"
    )
    m.add_argument("--p", type=_p_list, default=None)
    m.add_argument("--jobs", type=int, default=1)

    c = sub.add_parser("compare", parents=[common], help="analytic values against simulation")
    c.add_argument("scenario", type=Path)
    c.add_argument("--reps", type=int, default=10000)
    c.add_argument("--p", type=_p_list, default=None)
    c.add_argument("--jobs", type=int, default=1)

    k = sub.add_parser("cost", parents=[common], help="transport savings and investment screen")
    k.add_argument("--ci", type=float, required=True, help="yearly transport cost at p_i")
    k.add_argument("--pi", type=float, required=True, help="initial transport probability")
    k.add_argument("--dp", type=float, required=True, help="reduction of p")
    k.add_argument("--k", type=float, default=0.0, help="yearly station investment")

    f = sub.add_parser("fit", parents=[common], help="estimate rates from a failure log")
    f.add_argument("log", type=Path)
    return parser


def _provenance(path: Path | None = None, seed: int | None = None) -> dict:
    prov = {}
    if path is not None:
        prov["scenario"] = path.name
        prov["scenario_sha256"] = file_digest(path)
    if seed is not None:
        prov["seed"] = seed
    return prov


def cmd_analyze(args) -> list[Report]:
    spec = load_network(args.network)
    diags = net.validate(spec)
    if diags:
        raise InputError(f"{args.network}: " + "; ".join(diags))
    horizon = 52.0 if args.horizon is None else args.horizon
    summary = net.sojourn_moments_numeric(spec)
    lam, mean, cv = summary.total_rate, net.mean_sojourn_exact(spec), summary.cv
    single_exp = spec.node_count == 1 and spec.routing[0, 0] == 0 and spec.services[0].is_exponential()
    inputs = busy.QueueInputs(lam, mean, cv, service_is_exponential=single_exp)
    bp = busy.busy_period_metrics(inputs, horizon)
    rows = [
        ["total_rate", lam, "1/week"],
        ["mean_sojourn", mean, "week"],
        ["sojourn_cv", cv, "-"],
        ["rho", bp.rho, "-"],
        ["mean_busy_period", bp.mean_busy_period, "week"],
        ["r_lower", bp.r_lower, "count"],
        ["r_upper", bp.r_upper, "count"],
        ["customers_per_bp", bp.customers_per_bp, "count"],
        ["horizon", horizon, "week"],
    ]
    return [
        Report(
            "metric-set",
            f"Equivalent M|G|inf queue of {args.network.name}",
            ["metric", "value", "unit"],
            rows,
            [str, sig(4), str],
            _provenance(args.network),
        )
    ]


_TABLE_FORMATS = {
    "global": [sig(3), fixed(2), fixed(0), fixed(0), fixed(2)],
    "station": [sig(3), fixed(2), fixed(2), fixed(2), fixed(2)],
    "transport": [sig(3), fixed(2), fixed(2), fixed(2), fixed(2)],
}
_TABLE_FILES = {"global": "table_global.csv", "station": "table_station.csv", "transport": "table_transport.csv"}
_COLUMNS = ["mean_busy_period", "r_lower", "r_upper", "customers_per_bp"]


def _scenario_with_horizon(args, path: Path):
    sc, ps = load_scenario(path)
    if args.horizon is not None:
        sc = dataclasses.replace(sc, horizon=args.horizon)
    if getattr(args, "p", None):
        ps = args.p
    return sc, ps


def sweep_reports(sc: repair.RepairScenario, ps: Sequence[float], prov: dict) -> dict[str, Report]:
    rows = repair.sweep(sc, ps)
    out = {}
    for label in ("global", "station", "transport"):
        table = []
        for row in rows:
            m = row[label]
            table.append([row.p, m.mean_busy_period, m.r_lower, m.r_upper, m.customers_per_bp])
        rep = Report(
            "table",
            f"{label} queue, horizon {sc.horizon:g} weeks",
            ["p"] + _COLUMNS,
            table,
            _TABLE_FORMATS[label],
            dict(prov),
        )
        rates = [dict(zip(repair.LABELS, (sc.lam, *sc.with_p(p).rates)))[label] for p in ps]
        if all(r == 0 for r in rates):
            rep.notes.append("empty (rate 0)")
        elif any(r == 0 for r in rates):
            zero = ", ".join(f"{p:g}" for p, r in zip(ps, rates) if r == 0)
            rep.notes.append(f"empty (rate 0) at p = {zero}")
        out[label] = rep
    b = sc.with_p(ps[0])
    m = repair.evaluate(b)["base"]
    base = Report(
        "table",
        f"base queue (independent of p), horizon {sc.horizon:g} weeks",
        ["rate"] + _COLUMNS,
        [[b.rates[0], m.mean_busy_period, m.r_lower, m.r_upper, m.customers_per_bp]],
        [sig(3)] * 5,
        dict(prov),
    )
    if b.rates[0] == 0:
        base.notes.append("empty (rate 0)")
    out["base"] = base
    return out


def cmd_sweep(args) -> list[Report]:
    sc, ps = _scenario_with_horizon(args, args.scenario)
    reports = sweep_reports(sc, ps, _provenance(args.scenario))
    out_dir = Path(".") if args.out_dir is None else args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    for label, rep in reports.items():
        write_csv(out_dir / _TABLE_FILES.get(label, "base.csv"), rep)
    return [reports[k] for k in ("global", "station", "transport", "base")]


def _sim_rows(p, queue, est: dict | None, reps: int) -> list[list]:
    if est is None:
        return [[p, queue, metric, math.nan, math.nan, reps] for metric in sim.METRICS]
    return [[p, queue, e.metric, e.point, e.ci_half_width, e.replications] for e in est.values()]


def cmd_simulate(args) -> list[Report]:
    obj = load_json(args.scenario)
    rows = []
    notes = []
    if is_network(obj):
        if args.queue not in ("network", "global"):
            raise UsageError(f"--queue {args.queue} needs a repair scenario, not a network file")
        spec = load_network(args.scenario)
        diags = net.validate(spec)
        if diags:
            raise InputError(f"{args.scenario}: " + "; ".join(diags))
        horizon = 52.0 if args.horizon is None else args.horizon
        cfg = sim.SimConfig(spec, horizon, args.reps, args.seed, n_jobs=args.jobs)
        rows += _sim_rows(None, "network", sim.simulate(cfg), args.reps)
    else:
        sc, ps = _scenario_with_horizon(args, args.scenario)
        for p in ps:
            scp = sc.with_p(p)
            if args.queue == "network":
                cfg = sim.SimConfig(repair.build_network(scp), scp.horizon, args.reps, args.seed, n_jobs=args.jobs)
                rows += _sim_rows(p, "network", sim.simulate(cfg), args.reps)
                continue
            sq = repair.sub_queues(scp)[args.queue]
            if sq.lam == 0:
                notes.append(f"{args.queue} queue at p={p:g}: empty (rate 0), not simulated")
                rows += _sim_rows(p, args.queue, None, 0)
                continue
            cfg = sim.SimConfig(
                sim.single_node(sq.lam, sq.service, args.queue), scp.horizon, args.reps, args.seed, n_jobs=args.jobs
            )
            rows += _sim_rows(p, args.queue, sim.simulate(cfg), args.reps)
    rep = Report(
        "metric-set",
        f"simulated busy-period metrics ({args.reps} replications)",
        ["p", "queue", "metric", "point", "ci95", "reps"],
        rows,
        [sig(3), str, str, sig(5), sig(3), str],
        _provenance(args.scenario, args.seed),
        notes,
    )
    if args.reps < sim.MIN_REPS_FOR_CI:
        rep.notes.append(f"warning: fewer than {sim.MIN_REPS_FOR_CI} replications; CIs unreliable")
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        write_csv(args.out_dir / "simulation.csv", rep)
    return [rep]


def compare_rows(sc: repair.RepairScenario, ps: Sequence[float], reps: int, seed: int, n_jobs: int = 1):
    """Analytic vs simulated cells; returns (rows, notes, all_gating_covered)."""
    rows = []
    notes = []
    ok = True
    for p in ps:
        scp = sc.with_p(p)
        analytic = repair.evaluate(scp)
        queues = repair.sub_queues(scp)
        simulated = sim.simulate_subqueues(scp, reps, seed, n_jobs=n_jobs)
        for label in repair.LABELS:
            m, est, sq = analytic[label], simulated[label], queues[label]
            if est is None:
                rows.append([p, label, "all", math.nan, math.nan, math.nan, math.nan, "EMPTY", "no"])
                continue
            exp_nb = label != "global" and sq.service.is_exponential()
            eb = est["mean_busy_period"]
            cells = [("mean_busy_period", m.mean_busy_period, m.mean_busy_period, eb, eb.covers(m.mean_busy_period), True)]
            r = est["busy_period_starts"]
            lo, hi = r.ci
            cells.append(("busy_period_starts", m.r_lower, m.r_upper, r, lo <= m.r_upper and hi >= m.r_lower, True))
            nb = est["customers_per_bp"]
            cells.append(("customers_per_bp", m.customers_per_bp, m.customers_per_bp, nb, nb.covers(m.customers_per_bp), exp_nb))
            if not exp_nb:
                exact = math.exp(m.rho)
                cells.append(("customers_per_bp_exp_rho", exact, exact, nb, nb.covers(exact), False))
                notes.append(
                    f"p={p:g} {label}: cv-based N_B approximation {m.customers_per_bp:.4f} "
                    f"(service cv {sq.cv:.4f}) vs simulated {nb.point:.4f} +/- {nb.ci_half_width:.4f}; "
                    f"e^rho = {exact:.4f}"
                )
            for metric, a_lo, a_hi, e, covered, gating in cells:
                flag = "COVERED" if covered else "NOT-COVERED"
                rows.append([p, label, metric, a_lo, a_hi, e.point, e.ci_half_width, flag, "yes" if gating else "no"])
                if gating and not covered:
                    ok = False
    return rows, notes, ok


def cmd_compare(args) -> tuple[list[Report], int]:
    sc, ps = _scenario_with_horizon(args, args.scenario)
    rows, notes, ok = compare_rows(sc, ps, args.reps, args.seed, args.jobs)
    notes.append("gating: mean_busy_period, busy_period_starts (CI meets bounds), exponential customers_per_bp")
    notes.append("overall: " + ("all gating cells covered" if ok else "some gating cells NOT covered"))
    rep = Report(
        "comparison",
        f"analytic vs simulated ({args.reps} replications)",
        ["p", "queue", "metric", "analytic_low", "analytic_high", "sim_point", "ci95", "flag", "gating"],
        rows,
        [sig(3), str, str, fixed(4), fixed(4), fixed(4), fixed(4), str, str],
        _provenance(args.scenario, args.seed),
        notes,
    )
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        write_csv(args.out_dir / "comparison.csv", rep)
    return [rep], EXIT_OK if ok else EXIT_FAIL


def cmd_cost(args) -> list[Report]:
    try:
        c = cost.CostInputs(args.ci, args.pi, args.dp, args.k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    s = cost.differential_cost(c)
    v = cost.investment_viable(c)
    rows = [
        ["delta_cost", s.delta_cost_per_year, "per year"],
        ["final_cost", s.final_cost_per_year, "per year"],
        ["investment", c.investment_per_year, "per year"],
        ["viable", "yes" if v.viable else "no", "-"],
        ["margin", v.margin_per_year, "per year"],
    ]
    return [Report("metric-set", "transport savings", ["metric", "value", "unit"], rows, [str, sig(6), str])]


def cmd_fit(args) -> list[Report]:
    events = read_failure_log(args.log)
    try:
        fit = repair.fit_scenario_from_log(events)
    except ValueError as exc:
        raise InputError(f"{args.log}: {exc}") from None
    pc = fit.poisson
    rows = [
        ["events", fit.events, "count"],
        ["span", fit.span, "week"],
        ["lambda_hat", fit.lam, "1/week"],
        ["q_hat", fit.q, "-"],
        ["p_hat", fit.p if fit.p is not None else None, "-"],
        ["bins", pc.bins, "unit-week bins"],
        ["dispersion_index", pc.dispersion_index, "-"],
        ["chi2", pc.chi2, "-"],
        ["df", pc.df, "-"],
        ["chi2_upper_tail", pc.p_value, "-"],
    ]
    rep = Report(
        "metric-set", f"failure log {args.log.name}", ["metric", "value", "unit"], rows,
        [str, sig(5), str], _provenance(args.log),
    )
    if fit.p is None:
        rep.notes.append("p_hat absent: no station events")
    return [rep]


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    code = EXIT_OK
    try:
        if args.command == "compare":
            reports, code = cmd_compare(args)
        else:
            handler = {
                "analyze": cmd_analyze,
                "sweep": cmd_sweep,
                "simulate": cmd_simulate,
                "cost": cmd_cost,
                "fit": cmd_fit,
            }[args.command]
            reports = handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"infserv {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"infserv {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (net.NetworkError, ArithmeticError) as exc:
        print(f"infserv {args.command}: numeric error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(render_many(reports, args.output))
    return code


if __name__ == "__main__":
    sys.exit(main())
