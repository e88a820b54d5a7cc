"""Busy-period analytics for the M|G|inf queue.

Rates are per week and times in weeks. Zero arrival rate is allowed and
mapped to the analytic limits (E[B] = alpha, N_B = 1, R bounds = (1, 1)),
so sweeps can pass through empty sub-queues.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "QueueInputs",
    "BusyPeriodMetrics",
    "traffic_intensity",
    "mean_busy_period",
    "busy_period_count_bounds",
    "customers_per_bp_exponential",
    "customers_per_bp_general",
    "busy_period_metrics",
]


def _check(lam: float, alpha: float) -> None:
    if lam < 0:
        raise ValueError(f"arrival rate must be >= 0, got {lam}")
    if not alpha > 0:
        raise ValueError(f"mean service time must be > 0, got {alpha}")


def traffic_intensity(lam: float, alpha: float) -> float:
    _check(lam, alpha)
    return lam * alpha


def mean_busy_period(lam: float, alpha: float) -> float:
    """Mean busy-period length (e^rho - 1) / lambda, valid for any service law."""
    _check(lam, alpha)
    if lam == 0:
        return alpha
    # expm1 keeps the small-rate limit accurate
    return math.expm1(lam * alpha) / lam


def busy_period_count_bounds(lam: float, alpha: float, t: float) -> tuple[float, float]:
    """Lower/upper bounds on the mean number of busy periods starting in [0, t].

    The origin is taken to be the start of a busy period, so both bounds
    include that first one.
    """
    _check(lam, alpha)
    if t < 0:
        raise ValueError(f"horizon must be >= 0, got {t}")
    upper = 1.0 + lam * t
    return math.exp(-lam * alpha) * upper, upper


def customers_per_bp_exponential(rho: float) -> float:
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    return math.exp(rho)


def customers_per_bp_general(rho: float, gamma_s: float) -> float:
    """Approximate mean customers served per busy period for a general service law.

    ``gamma_s`` is the service coefficient of variation. At rho = 0 this
    returns 1 (empty-system convention) even though the expression itself
    tends to 1.5 there.
    """
    if rho < 0 or gamma_s < 0:
        raise ValueError(f"need rho >= 0 and gamma_s >= 0, got ({rho}, {gamma_s})")
    if rho == 0:
        return 1.0
    x = rho * (gamma_s**2 + 1.0)
    return (math.exp(x) * (x + 1.0) + x - 1.0) / (2.0 * x)


@dataclass(frozen=True)
class QueueInputs:
    lam: float
    service_mean: float
    service_cv: float
    service_is_exponential: bool = False

    def __post_init__(self):
        _check(self.lam, self.service_mean)
        if self.service_cv < 0:
            raise ValueError(f"service cv must be >= 0, got {self.service_cv}")


@dataclass(frozen=True)
class BusyPeriodMetrics:
    rho: float
    mean_busy_period: float
    r_lower: float
    r_upper: float
    customers_per_bp: float
    horizon: float


def busy_period_metrics(q: QueueInputs, horizon: float) -> BusyPeriodMetrics:
    """All busy-period figures for one queue.

    N_B uses e^rho when the service is exponential and the cv-based
    approximation otherwise.
    """
    rho = traffic_intensity(q.lam, q.service_mean)
    lower, upper = busy_period_count_bounds(q.lam, q.service_mean, horizon)
    if q.service_is_exponential:
        nb = customers_per_bp_exponential(rho)
    else:
        nb = customers_per_bp_general(rho, q.service_cv)
    return BusyPeriodMetrics(
        rho=rho,
        mean_busy_period=mean_busy_period(q.lam, q.service_mean),
        r_lower=lower,
        r_upper=upper,
        customers_per_bp=nb,
        horizon=horizon,
    )
