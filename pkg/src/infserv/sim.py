"""Discrete-event Monte Carlo oracle for infinite-server networks.

Because no customer ever waits, a customer's whole trip through the network
is fixed at its arrival: the path is drawn from the routing matrix and the
sojourn is the sum of the sampled service times. Occupancy of the network
then changes only at arrival and final-departure instants, and busy periods
are recovered exactly from the sorted arrival times and the running maximum
of departure times.

Each replication draws from its own stream, seeded by (seed, replication
index), so results do not depend on how replications are spread over
worker processes.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dist import ServiceDistribution
from .net import NetworkSpec, validate, NetworkError
from .repair import RepairScenario, sub_queues

__all__ = [
    "SimConfig",
    "SimulationEstimate",
    "ReplicationStats",
    "run_replication",
    "simulate",
    "simulate_subqueues",
    "single_node",
]

Z95 = 1.959963984540054
METRICS = ("mean_busy_period", "busy_period_starts", "customers_per_bp")
MIN_REPS_FOR_CI = 30


@dataclass(frozen=True)
class SimConfig:
    network: NetworkSpec
    horizon: float = 52.0
    replications: int = 1000
    seed: int = 0
    condition_on_bp_start: bool = True
    # follow the busy period open at the horizon to its natural end (arrivals
    # keep coming); when False it is cut off and left out of the averages
    finish_open_busy_period: bool = True
    n_jobs: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.horizon > 0:
            raise ValueError("horizon must be > 0")


@dataclass(frozen=True)
class SimulationEstimate:
    metric: str
    point: float
    ci_half_width: float
    replications: int
    warning: str | None = field(default=None, compare=False)

    @property
    def ci(self) -> tuple[float, float]:
        return self.point - self.ci_half_width, self.point + self.ci_half_width

    def covers(self, value: float) -> bool:
        lo, hi = self.ci
        return lo <= value <= hi


@dataclass(frozen=True)
class ReplicationStats:
    starts: int  # busy periods beginning in [0, horizon]
    completed: int  # busy periods included in the length/customer averages
    total_length: float
    total_customers: int
    arrivals: int
    served: int


def single_node(lam: float, service: ServiceDistribution, name: str = "queue") -> NetworkSpec:
    return NetworkSpec([lam], [[0.0]], (service,), (name,))


class _Sampler:
    """Path sampling for one network; built once per simulate() call."""

    def __init__(self, spec: NetworkSpec):
        self.services = spec.services
        self.entry_probs = spec.exo_rates / spec.total_rate
        self.total_rate = spec.total_rate
        j = spec.node_count
        self.cum = np.cumsum(spec.routing, axis=1)
        self.has_routing = bool(np.any(spec.routing > 0))
        self.j = j

    def entries(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.j == 1:
            return np.zeros(n, dtype=np.intp)
        return rng.choice(self.j, size=n, p=self.entry_probs)

    def sojourns(self, rng: np.random.Generator, nodes: np.ndarray) -> np.ndarray:
        total = np.zeros(len(nodes))
        active = np.arange(len(nodes))
        cur = nodes.copy()
        while len(active):
            for j in range(self.j):
                sel = cur == j
                k = int(sel.sum())
                if k:
                    total[active[sel]] += self.services[j].sample(rng, k)
            if not self.has_routing:
                break
            u = rng.random(len(active))
            # next node index; j means exit
            nxt = (u[:, None] >= self.cum[cur]).sum(axis=1)
            stay = nxt < self.j
            active, cur = active[stay], nxt[stay]
        return total


def run_replication(
    sampler: _Sampler,
    horizon: float,
    rng: np.random.Generator,
    condition_on_bp_start: bool = True,
    finish_open: bool = True,
) -> ReplicationStats:
    lam = sampler.total_rate
    n = rng.poisson(lam * horizon)
    times = np.sort(rng.uniform(0.0, horizon, n))
    if condition_on_bp_start:
        times = np.concatenate(([0.0], times))
    m = len(times)
    if m == 0:
        return ReplicationStats(0, 0, 0.0, 0, 0, 0)
    deps = times + sampler.sojourns(rng, sampler.entries(rng, m))

    reach = np.maximum.accumulate(deps)
    new_bp = np.empty(m, dtype=bool)
    new_bp[0] = True
    new_bp[1:] = times[1:] > reach[:-1]
    start_idx = np.flatnonzero(new_bp)
    end_idx = np.append(start_idx[1:] - 1, m - 1)
    starts = times[start_idx]
    ends = reach[end_idx]
    sizes = end_idx - start_idx + 1

    served = m
    last_end = float(ends[-1])
    last_size = int(sizes[-1])
    open_at_horizon = last_end > horizon
    if open_at_horizon and finish_open:
        t = horizon
        while True:
            t += rng.exponential(1.0 / lam)
            if t > last_end:
                break
            soj = sampler.sojourns(rng, sampler.entries(rng, 1))[0]
            last_end = max(last_end, t + soj)
            last_size += 1
            served += 1
        ends = ends.copy()
        sizes = sizes.copy()
        ends[-1] = last_end
        sizes[-1] = last_size
        keep = len(starts)
    elif open_at_horizon:
        keep = len(starts) - 1
    else:
        keep = len(starts)

    lengths = ends[:keep] - starts[:keep]
    return ReplicationStats(
        starts=len(starts),
        completed=keep,
        total_length=float(lengths.sum()),
        total_customers=int(sizes[:keep].sum()),
        arrivals=served,
        served=served,
    )


def _rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(rep,))))


def _run_chunk(args) -> list[ReplicationStats]:
    spec, horizon, seed, reps, cond, finish = args
    sampler = _Sampler(spec)
    return [run_replication(sampler, horizon, _rng(seed, r), cond, finish) for r in reps]


def _replications(cfg: SimConfig) -> list[ReplicationStats]:
    reps = range(cfg.replications)
    base = (cfg.network, cfg.horizon, cfg.seed)
    flags = (cfg.condition_on_bp_start, cfg.finish_open_busy_period)
    if cfg.n_jobs <= 1:
        return _run_chunk((*base, reps, *flags))
    chunks = [reps[i :: cfg.n_jobs] for i in range(cfg.n_jobs)]
    with ProcessPoolExecutor(cfg.n_jobs) as pool:
        parts = list(pool.map(_run_chunk, [(*base, c, *flags) for c in chunks]))
    out: list[ReplicationStats | None] = [None] * cfg.replications
    for chunk, res in zip(chunks, parts):
        for r, st in zip(chunk, res):
            out[r] = st
    return out  # type: ignore[return-value]


def _mean_estimate(metric: str, x: np.ndarray, warn: str | None) -> SimulationEstimate:
    n = len(x)
    half = Z95 * x.std(ddof=1) / math.sqrt(n) if n > 1 else math.inf
    return SimulationEstimate(metric, float(x.mean()), float(half), n, warn)


def _ratio_estimate(metric: str, num: np.ndarray, den: np.ndarray, warn: str | None) -> SimulationEstimate:
    # pooled ratio with a delta-method interval across replications
    n = len(num)
    if den.sum() == 0:
        return SimulationEstimate(metric, math.nan, math.inf, n, warn)
    r = num.sum() / den.sum()
    if n < 2:
        return SimulationEstimate(metric, float(r), math.inf, n, warn)
    resid = num - r * den
    se = math.sqrt(resid.var(ddof=1) / n) / den.mean()
    return SimulationEstimate(metric, float(r), float(Z95 * se), n, warn)


def summarize(stats: list[ReplicationStats]) -> dict[str, SimulationEstimate]:
    n = len(stats)
    warn = None
    if n < MIN_REPS_FOR_CI:
        warn = f"only {n} replications; normal-approximation CI is unreliable below {MIN_REPS_FOR_CI}"
        warnings.warn(warn, RuntimeWarning, stacklevel=3)
    length = np.array([s.total_length for s in stats])
    completed = np.array([s.completed for s in stats], dtype=float)
    customers = np.array([s.total_customers for s in stats], dtype=float)
    starts = np.array([s.starts for s in stats], dtype=float)
    return {
        "mean_busy_period": _ratio_estimate("mean_busy_period", length, completed, warn),
        "busy_period_starts": _mean_estimate("busy_period_starts", starts, warn),
        "customers_per_bp": _ratio_estimate("customers_per_bp", customers, completed, warn),
    }


def simulate(cfg: SimConfig) -> dict[str, SimulationEstimate]:
    """Busy-period estimates (E[B], R(horizon), N_B) for the whole network."""
    diags = validate(cfg.network)
    if diags:
        raise NetworkError("; ".join(diags))
    return summarize(_replications(cfg))


def simulate_subqueues(
    sc: RepairScenario,
    replications: int = 1000,
    seed: int = 0,
    horizon: float | None = None,
    **overrides,
) -> dict[str, dict[str, SimulationEstimate] | None]:
    """Simulate the global, base, station and transport queues independently.

    Zero-rate queues map to None. Each queue gets its own seed offset so the
    four runs use unrelated streams.
    """
    out: dict[str, dict[str, SimulationEstimate] | None] = {}
    h = sc.horizon if horizon is None else horizon
    for i, (label, sq) in enumerate(sub_queues(sc).items()):
        if sq.lam == 0:
            out[label] = None
            continue
        cfg = SimConfig(
            single_node(sq.lam, sq.service, label),
            horizon=h,
            replications=replications,
            seed=_queue_seed(seed, i),
            **overrides,
        )
        out[label] = simulate(cfg)
    return out


def _queue_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(1_000_003, index)).generate_state(2, np.uint64)[0])
