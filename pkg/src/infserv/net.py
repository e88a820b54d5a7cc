"""Open networks of infinite-server nodes with Poisson exogenous arrivals.

Such a network behaves, as a whole, like a single M|G|inf queue whose
arrival rate is the total exogenous rate and whose service time is a
customer's network sojourn time. This module builds that equivalent queue.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from . import dist
from .dist import ServiceDistribution

__all__ = [
    "NetworkSpec",
    "SojournSummary",
    "NetworkError",
    "spectral_radius",
    "validate",
    "sojourn_lt",
    "mean_sojourn_exact",
    "sojourn_moments_numeric",
]

SINGULAR_TOL = 1e-12
OPEN_TOL = 1e-9


class NetworkError(ValueError):
    """Invalid network or numerically singular system."""


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    exo_rates: np.ndarray
    routing: np.ndarray
    services: tuple
    node_names: tuple = field(default=())

    def __post_init__(self):
        rates = np.array(self.exo_rates, dtype=float).reshape(-1)
        routing = np.array(self.routing, dtype=float)
        rates.setflags(write=False)
        routing.setflags(write=False)
        object.__setattr__(self, "exo_rates", rates)
        object.__setattr__(self, "routing", routing)
        object.__setattr__(self, "services", tuple(self.services))
        names = tuple(self.node_names) or tuple(f"node{j + 1}" for j in range(len(rates)))
        object.__setattr__(self, "node_names", names)

    @property
    def node_count(self) -> int:
        return len(self.exo_rates)

    @property
    def total_rate(self) -> float:
        return float(self.exo_rates.sum())

    @property
    def exit_probs(self) -> np.ndarray:
        return 1.0 - self.routing.sum(axis=1)

    def permuted(self, order: Sequence[int]) -> "NetworkSpec":
        order = list(order)
        return NetworkSpec(
            self.exo_rates[order],
            self.routing[np.ix_(order, order)],
            tuple(self.services[j] for j in order),
            tuple(self.node_names[j] for j in order),
        )

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "NetworkSpec":
        nodes = obj["nodes"]
        return cls(
            [float(n.get("exo_rate", 0.0)) for n in nodes],
            obj["routing"],
            tuple(dist.from_dict(n["service"]) for n in nodes),
            tuple(n.get("name", f"node{j + 1}") for j, n in enumerate(nodes)),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "nodes": [
                {"name": name, "exo_rate": float(rate), "service": dist.to_dict(svc)}
                for name, rate, svc in zip(self.node_names, self.exo_rates, self.services)
            ],
            "routing": self.routing.tolist(),
        }


@dataclass(frozen=True)
class SojournSummary:
    total_rate: float
    mean: float
    second_moment: float

    @property
    def variance(self) -> float:
        return max(self.second_moment - self.mean**2, 0.0)

    @property
    def cv(self) -> float:
        return float(np.sqrt(self.variance) / self.mean)


def spectral_radius(p: np.ndarray, iterations: int = 200, tol: float = 1e-10) -> float:
    """Spectral radius of a nonnegative matrix by power iteration.

    The estimate is the geometric-mean growth of ||P^k 1|| over the second
    half of the run, which also converges for periodic matrices.
    """
    p = np.asarray(p, dtype=float)
    x = np.ones(p.shape[0])
    log_norms = [0.0]
    prev = None
    for k in range(1, iterations + 1):
        x = p @ x
        n = np.abs(x).max()
        if n == 0.0:
            return 0.0
        x /= n
        log_norms.append(log_norms[-1] + np.log(n))
        half = k // 2
        est = float(np.exp((log_norms[k] - log_norms[half]) / (k - half)))
        if prev is not None and k > 20 and abs(est - prev) < tol:
            return est
        prev = est
    return est


def validate(spec: NetworkSpec) -> list[str]:
    """Diagnostics for every violated invariant; an empty list means valid."""
    out: list[str] = []
    j = spec.node_count
    if j < 1:
        return ["network has no nodes"]
    p = spec.routing
    if p.shape != (j, j):
        return [f"routing matrix has shape {p.shape}, expected ({j}, {j})"]
    if len(spec.services) != j:
        out.append(f"{len(spec.services)} services given for {j} nodes")
    for i, svc in enumerate(spec.services):
        if not isinstance(svc, ServiceDistribution):
            out.append(f"node {i + 1} service is not a distribution: {svc!r}")
    for i, r in enumerate(spec.exo_rates):
        if not r >= 0:
            out.append(f"node {i + 1} exogenous rate {r:g} < 0")
    if not spec.exo_rates.sum() > 0:
        out.append("no exogenous arrivals (total rate 0)")
    bad_entry = False
    for a in range(j):
        for b in range(j):
            if not 0 <= p[a, b] <= 1:
                out.append(f"routing entry ({a + 1}, {b + 1}) = {p[a, b]:g} outside [0, 1]")
                bad_entry = True
    sums = p.sum(axis=1)
    for a, s in enumerate(sums):
        if s > 1 + 1e-12:
            out.append(f"row {a + 1} sum {s:g} > 1")
    if not bad_entry and np.all(sums <= 1 + 1e-12):
        rad = spectral_radius(p)
        if rad >= 1 - OPEN_TOL:
            out.append(f"network not open (spectral radius {rad:.6g})")
    return out


def _require_valid(spec: NetworkSpec) -> None:
    diags = validate(spec)
    if diags:
        raise NetworkError("; ".join(diags))


def _solve(m: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    lu, piv = lu_factor(m, check_finite=True)
    scale = np.abs(m).sum(axis=1).max()
    if np.abs(np.diag(lu)).min() < SINGULAR_TOL * scale:
        raise NetworkError(f"singular linear system ({what})")
    return lu_solve((lu, piv), rhs)


def _sojourn_lt_unchecked(spec: NetworkSpec, s: float) -> float:
    g = np.array([svc.laplace(s) for svc in spec.services])
    lam_s = spec.exo_rates * g
    # a hop j -> l then spends a node-l service time
    p_s = spec.routing * g[np.newaxis, :]
    eye = np.eye(spec.node_count)
    # row vector Lambda(s)^T (I - P(s))^{-1}, obtained by solving the transpose
    y = _solve((eye - p_s).T, lam_s, f"|I - P(s)| ~ 0 at s={s:g}")
    return float(y @ spec.exit_probs / spec.total_rate)


def sojourn_lt(spec: NetworkSpec, s: float) -> float:
    """Laplace transform of the network sojourn time at s >= 0."""
    if s < 0:
        raise ValueError(f"Laplace argument must be >= 0, got {s}")
    _require_valid(spec)
    return _sojourn_lt_unchecked(spec, s)


def mean_sojourn_exact(spec: NetworkSpec) -> float:
    """Mean sojourn time: visit-weighted node means, one real linear solve."""
    _require_valid(spec)
    means = np.array([svc.moments().mean for svc in spec.services])
    eye = np.eye(spec.node_count)
    visits = _solve((eye - spec.routing).T, spec.exo_rates, "I - P")
    return float(visits @ means / spec.total_rate)


def sojourn_moments_numeric(spec: NetworkSpec, rel_step: float = 1e-4, check_tol: float = 1e-5) -> SojournSummary:
    """First two sojourn moments by finite differences of the transform.

    The numeric mean is cross-checked against ``mean_sojourn_exact``.
    """
    exact = mean_sojourn_exact(spec)
    m1, m2 = dist.lt_derivatives(lambda s: _sojourn_lt_unchecked(spec, s), exact, rel_step)
    if abs(m1 - exact) > check_tol * exact:
        raise NetworkError(
            f"numeric mean {m1:.10g} disagrees with exact mean {exact:.10g}; step-size problem"
        )
    return SojournSummary(spec.total_rate, m1, max(m2, m1**2))
