"""Analytic and simulated busy-period analysis of infinite-server queueing networks."""

__version__ = "0.1.0"

from . import busy, cost, dist, net, repair  # noqa: E402,F401
from .busy import (  # noqa: E402,F401
    busy_period_count_bounds,
    customers_per_bp_exponential,
    customers_per_bp_general,
    mean_busy_period,
    traffic_intensity,
)
from .dist import Convolution, Deterministic, Erlang, Exponential, Mixture, Uniform  # noqa: E402,F401
from .net import NetworkSpec  # noqa: E402,F401
from .repair import RepairScenario  # noqa: E402,F401
