"""Two-echelon repair system: a base, a remote station and station-to-base transport.

Failures arrive as a Poisson stream at rate ``lam``. A fraction ``q`` is
detected at the remote station; of those, a fraction ``p`` is transported to
the base and repaired there. Node 1 is the base, node 2 the station and
node 3 the transport leg, which always feeds node 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Iterable, Sequence

import numpy as np
from scipy import stats

from . import busy, dist
from .dist import Convolution, Mixture, ServiceDistribution
from .net import NetworkSpec

__all__ = [
    "RepairScenario",
    "SubQueue",
    "SweepRow",
    "PoissonCheck",
    "LogFit",
    "LABELS",
    "build_network",
    "global_service",
    "global_cv",
    "closed_form_lt",
    "sub_queues",
    "evaluate",
    "sweep",
    "scenario_from_dict",
    "scenario_to_dict",
    "fit_scenario_from_log",
]

LABELS = ("global", "base", "station", "transport")


@dataclass(frozen=True)
class RepairScenario:
    lam: float
    q: float
    p: float
    g1: ServiceDistribution
    g2: ServiceDistribution
    g3: ServiceDistribution
    horizon: float = 52.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"failure rate must be > 0, got {self.lam}")
        for name in ("p", "q"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")

    def with_p(self, p: float) -> "RepairScenario":
        return replace(self, p=p)

    @property
    def rates(self) -> tuple[float, float, float]:
        """(base, station, transport) arrival rates."""
        lam, q, p = self.lam, self.q, self.p
        return (1 - q) * lam, (1 - p) * q * lam, p * q * lam

    @property
    def transport_service(self) -> Convolution:
        return Convolution((self.g1, self.g3))


@dataclass(frozen=True)
class SubQueue:
    label: str
    lam: float
    service: ServiceDistribution

    @property
    def rho(self) -> float:
        return self.lam * self.service.moments().mean

    @property
    def cv(self) -> float:
        return self.service.moments().cv


@dataclass(frozen=True)
class SweepRow:
    p: float
    metrics: dict  # label -> busy.BusyPeriodMetrics

    def __getitem__(self, label: str) -> busy.BusyPeriodMetrics:
        return self.metrics[label]


def build_network(sc: RepairScenario) -> NetworkSpec:
    routing = np.zeros((3, 3))
    routing[2, 0] = 1.0
    return NetworkSpec(
        np.array(sc.rates),
        routing,
        (sc.g1, sc.g2, sc.g3),
        ("base", "station", "transport"),
    )


def global_service(sc: RepairScenario) -> ServiceDistribution:
    """Failure-to-repair time of an arbitrary failure (mixture over the three routes)."""
    q, p = sc.q, sc.p
    parts = [
        (1 - q, sc.g1),
        ((1 - p) * q, sc.g2),
        (p * q, sc.transport_service),
    ]
    parts = [(w, d) for w, d in parts if w > 0]
    if len(parts) == 1:
        return parts[0][1]
    return Mixture(tuple(parts))


def global_cv(sc: RepairScenario) -> float:
    """Coefficient of variation of the global service law, from the closed-form expression."""
    q, p = sc.q, sc.p
    m1, m2, m3 = sc.g1.moments(), sc.g2.moments(), sc.g3.moments()
    a1, a2, a3 = m1.mean, m2.mean, m3.mean
    v1, v2, v3 = m1.variance, m2.variance, m3.variance
    num = (1 - q) * (v1 + a1**2) + (1 - p) * q * (v2 + a2**2) + p * q * (v1 + v3 + (a1 + a3) ** 2)
    den = ((1 - q) * a1 + (1 - p) * q * a2 + p * q * (a1 + a3)) ** 2
    return math.sqrt(max(num / den - 1.0, 0.0))


def closed_form_lt(sc: RepairScenario, s: float) -> float:
    """Sojourn transform written out for this topology."""
    q, p = sc.q, sc.p
    g1, g2, g3 = sc.g1.laplace(s), sc.g2.laplace(s), sc.g3.laplace(s)
    return (1 - q) * g1 + (1 - p) * q * g2 + p * q * g1 * g3


def sub_queues(sc: RepairScenario) -> dict[str, SubQueue]:
    lam_b, lam_st, lam_tr = sc.rates
    return {
        "global": SubQueue("global", sc.lam, global_service(sc)),
        "base": SubQueue("base", lam_b, sc.g1),
        "station": SubQueue("station", lam_st, sc.g2),
        "transport": SubQueue("transport", lam_tr, sc.transport_service),
    }


def _queue_metrics(sq: SubQueue, horizon: float, cv: float | None = None) -> busy.BusyPeriodMetrics:
    m = sq.service.moments()
    inputs = busy.QueueInputs(
        sq.lam,
        m.mean,
        m.cv if cv is None else cv,
        service_is_exponential=sq.label != "global" and sq.service.is_exponential(),
    )
    return busy.busy_period_metrics(inputs, horizon)


def evaluate(sc: RepairScenario) -> SweepRow:
    """Busy-period metrics of all four sub-queues at the scenario's own p."""
    queues = sub_queues(sc)
    metrics = {}
    for label, sq in queues.items():
        cv = global_cv(sc) if label == "global" else None
        metrics[label] = _queue_metrics(sq, sc.horizon, cv)
    return SweepRow(sc.p, metrics)


def sweep(sc: RepairScenario, p_values: Iterable[float]) -> list[SweepRow]:
    return [evaluate(sc.with_p(float(p))) for p in p_values]


def scenario_from_dict(obj: dict[str, Any]) -> tuple[RepairScenario, list[float]]:
    """Parse a repair scenario file; returns the scenario (at the first p) and the p list."""
    missing = [k for k in ("lambda", "q", "p", "g1", "g2", "g3") if k not in obj]
    if missing:
        raise ValueError(f"scenario missing field(s) {missing}")
    ps = obj["p"]
    ps = [float(x) for x in (ps if isinstance(ps, list) else [ps])]
    if not ps:
        raise ValueError("scenario 'p' list is empty")
    sc = RepairScenario(
        lam=float(obj["lambda"]),
        q=float(obj["q"]),
        p=ps[0],
        g1=dist.from_dict(obj["g1"]),
        g2=dist.from_dict(obj["g2"]),
        g3=dist.from_dict(obj["g3"]),
        horizon=float(obj.get("horizon_weeks", 52.0)),
    )
    for p in ps:
        if not 0 <= p <= 1:
            raise ValueError(f"p value {p} outside [0, 1]")
    return sc, ps


def scenario_to_dict(sc: RepairScenario, ps: Sequence[float] | None = None) -> dict[str, Any]:
    return {
        "lambda": sc.lam,
        "q": sc.q,
        "p": list(ps) if ps is not None else [sc.p],
        "g1": dist.to_dict(sc.g1),
        "g2": dist.to_dict(sc.g2),
        "g3": dist.to_dict(sc.g3),
        "horizon_weeks": sc.horizon,
    }


@dataclass(frozen=True)
class PoissonCheck:
    """Count-dispersion statistics over unit-week bins. No accept/reject verdict."""

    bins: int
    mean_count: float
    variance: float
    dispersion_index: float
    chi2: float
    df: int
    p_value: float


@dataclass(frozen=True)
class LogFit:
    lam: float
    q: float
    p: float | None
    events: int
    span: float
    poisson: PoissonCheck


def _dispersion(times: np.ndarray) -> PoissonCheck:
    t0 = times[0]
    nbins = int(math.floor(times[-1] - t0))
    if nbins < 2:
        nan = float("nan")
        return PoissonCheck(max(nbins, 0), nan, nan, nan, nan, 0, nan)
    counts, _ = np.histogram(times, bins=t0 + np.arange(nbins + 1))
    mean = counts.mean()
    var = counts.var(ddof=1)
    index = var / mean if mean > 0 else float("nan")
    chi2 = float(((counts - mean) ** 2).sum() / mean) if mean > 0 else float("nan")
    df = nbins - 1
    return PoissonCheck(nbins, float(mean), float(var), float(index), chi2, df, float(stats.chi2.sf(chi2, df)))


def fit_scenario_from_log(events: Sequence[tuple[float, str, bool]]) -> LogFit:
    """Estimate (lambda, q, p) from a failure log and report count dispersion.

    ``events`` holds (timestamp in weeks, site in {"base", "station"},
    transported flag). ``p`` is None when no station events were logged.
    """
    if len(events) < 2:
        raise ValueError("need at least 2 events")
    times = np.array([float(e[0]) for e in events])
    if np.any(np.diff(times) < 0):
        raise ValueError("timestamps must be nondecreasing")
    span = float(times[-1] - times[0])
    if span <= 0:
        raise ValueError("log spans zero time; rate is undefined")
    sites = [e[1] for e in events]
    bad = sorted({s for s in sites if s not in ("base", "station")})
    if bad:
        raise ValueError(f"unknown site(s) {bad}")
    station = [bool(e[2]) for e in events if e[1] == "station"]
    p_hat = sum(station) / len(station) if station else None
    return LogFit(
        lam=len(events) / span,
        q=len(station) / len(events),
        p=p_hat,
        events=len(events),
        span=span,
        poisson=_dispersion(times),
    )
