"""Service-time distributions with closed-form Laplace-Stieltjes transforms.

All times are in weeks. Every distribution is an immutable value exposing
``laplace(s)``, ``moments()`` and ``sample(rng, size)``; the module-level
functions of the same names simply dispatch to those methods.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

__all__ = [
    "Moments",
    "ServiceDistribution",
    "Exponential",
    "Deterministic",
    "Erlang",
    "Uniform",
    "Convolution",
    "Mixture",
    "laplace",
    "moments",
    "sample",
    "lt_derivatives",
    "from_dict",
    "to_dict",
]

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float

    @property
    def cv(self) -> float:
        return math.sqrt(self.variance) / self.mean

    @property
    def second_moment(self) -> float:
        return self.variance + self.mean**2


def _check_s(s):
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError(f"Laplace argument must be >= 0, got {s!r}")
    return arr


def _out(value, s):
    return float(value) if np.ndim(s) == 0 else value


class ServiceDistribution:
    """Base class. Subclasses implement ``_lt``, ``moments`` and ``sample``."""

    def laplace(self, s):
        """E[exp(-s S)] for s >= 0 (scalar or array)."""
        arr = _check_s(s)
        return _out(self._lt(arr), s)

    def _lt(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def moments(self) -> Moments:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def is_exponential(self) -> bool:
        return False


@dataclass(frozen=True)
class Exponential(ServiceDistribution):
    mean: float

    def __post_init__(self):
        if not self.mean > 0:
            raise ValueError(f"Exponential mean must be > 0, got {self.mean}")

    def _lt(self, s):
        return 1.0 / (1.0 + self.mean * s)

    def moments(self):
        return Moments(self.mean, self.mean**2)

    def sample(self, rng, size=None):
        return rng.exponential(self.mean, size)

    def is_exponential(self):
        return True


@dataclass(frozen=True)
class Deterministic(ServiceDistribution):
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"Deterministic value must be > 0, got {self.value}")

    @property
    def mean(self):
        return self.value

    def _lt(self, s):
        return np.exp(-s * self.value)

    def moments(self):
        return Moments(self.value, 0.0)

    def sample(self, rng, size=None):
        if size is None:
            return float(self.value)
        return np.full(size, float(self.value))


@dataclass(frozen=True)
class Erlang(ServiceDistribution):
    shape: int
    mean: float

    def __post_init__(self):
        if int(self.shape) != self.shape or self.shape < 1:
            raise ValueError(f"Erlang shape must be a positive integer, got {self.shape}")
        if not self.mean > 0:
            raise ValueError(f"Erlang mean must be > 0, got {self.mean}")

    def _lt(self, s):
        k = self.shape
        return (k / (k + self.mean * s)) ** k

    def moments(self):
        return Moments(self.mean, self.mean**2 / self.shape)

    def sample(self, rng, size=None):
        return rng.gamma(self.shape, self.mean / self.shape, size)

    def is_exponential(self):
        return self.shape == 1


@dataclass(frozen=True)
class Uniform(ServiceDistribution):
    low: float
    high: float

    def __post_init__(self):
        if not 0 <= self.low < self.high:
            raise ValueError(f"Uniform needs 0 <= low < high, got ({self.low}, {self.high})")

    @property
    def mean(self):
        return 0.5 * (self.low + self.high)

    def _lt(self, s):
        a, b = self.low, self.high
        s = np.asarray(s, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            # exp(-sa) - exp(-sb) = exp(-sa) * (1 - exp(-s(b-a))), written with expm1
            val = -np.exp(-s * a) * np.expm1(-s * (b - a)) / (s * (b - a))
        return np.where(s == 0, 1.0, val)

    def moments(self):
        return Moments(self.mean, (self.high - self.low) ** 2 / 12.0)

    def sample(self, rng, size=None):
        return rng.uniform(self.low, self.high, size)


@dataclass(frozen=True)
class Convolution(ServiceDistribution):
    """Sum of independent service times."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 2:
            raise ValueError("Convolution needs at least 2 factors")

    @property
    def mean(self):
        return sum(f.mean for f in self.factors)

    def _lt(self, s):
        out = np.ones_like(s, dtype=float)
        for f in self.factors:
            out = out * f._lt(s)
        return out

    def moments(self):
        ms = [f.moments() for f in self.factors]
        return Moments(sum(m.mean for m in ms), sum(m.variance for m in ms))

    def sample(self, rng, size=None):
        total = self.factors[0].sample(rng, size)
        for f in self.factors[1:]:
            total = total + f.sample(rng, size)
        return total


@dataclass(frozen=True)
class Mixture(ServiceDistribution):
    """Probability mixture; ``components`` is a sequence of (weight, distribution)."""

    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), d) for w, d in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) < 2:
            raise ValueError("Mixture needs at least 2 components")
        weights = [w for w, _ in comps]
        if any(w < 0 or w > 1 for w in weights):
            raise ValueError(f"Mixture weights must lie in [0, 1], got {weights}")
        if abs(sum(weights) - 1.0) > WEIGHT_TOL:
            raise ValueError(f"Mixture weights sum to {sum(weights)!r}, not 1")

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])

    @property
    def mean(self):
        return sum(w * d.mean for w, d in self.components)

    def _lt(self, s):
        out = np.zeros_like(s, dtype=float)
        for w, d in self.components:
            out = out + w * d._lt(s)
        return out

    def moments(self):
        ms = [(w, d.moments()) for w, d in self.components]
        mean = sum(w * m.mean for w, m in ms)
        # within- plus between-component variance; avoids E[S^2] - E[S]^2 cancellation
        var = sum(w * (m.variance + (m.mean - mean) ** 2) for w, m in ms)
        return Moments(mean, var)

    def sample(self, rng, size=None):
        if size is None:
            i = rng.choice(len(self.components), p=self.weights)
            return self.components[i][1].sample(rng)
        n = int(np.prod(size))
        idx = rng.choice(len(self.components), size=n, p=self.weights)
        out = np.empty(n)
        for i, (_, d) in enumerate(self.components):
            mask = idx == i
            k = int(mask.sum())
            if k:
                out[mask] = d.sample(rng, k)
        return out.reshape(size)


def laplace(d: ServiceDistribution, s):
    return d.laplace(s)


def moments(d: ServiceDistribution) -> Moments:
    return d.moments()


def sample(d: ServiceDistribution, rng: np.random.Generator, size=None):
    return d.sample(rng, size)


def lt_derivatives(f, scale: float = 1.0, rel_step: float = 1e-4) -> tuple[float, float]:
    """First and second moments from a transform ``f`` via forward differences at 0.

    Uses steps h and h/2 (h = rel_step * scale) and one Richardson step for each
    derivative. Only nonnegative arguments are evaluated, since the transform
    need not exist left of the origin.
    """
    h = rel_step * scale
    f0 = f(0.0)

    def first(step):
        return (f0 - f(step)) / step

    def second(step):
        return (f(2 * step) - 2 * f(step) + f0) / step**2

    m1 = 2 * first(h / 2) - first(h)
    m2 = 2 * second(h / 2) - second(h)
    return m1, m2


_KINDS = {
    "exponential": (Exponential, ("mean",)),
    "deterministic": (Deterministic, ("value",)),
    "erlang": (Erlang, ("shape", "mean")),
    "uniform": (Uniform, ("low", "high")),
}


def from_dict(obj: dict[str, Any]) -> ServiceDistribution:
    """Build a distribution from its tagged JSON object."""
    try:
        kind = obj["kind"].lower()
    except (KeyError, AttributeError, TypeError):
        raise ValueError(f"service object needs a string 'kind': {obj!r}") from None
    if kind == "convolution":
        return Convolution(tuple(from_dict(f) for f in obj["factors"]))
    if kind == "mixture":
        return Mixture(tuple((c["weight"], from_dict(c["service"])) for c in obj["components"]))
    if kind not in _KINDS:
        raise ValueError(f"unknown service kind {kind!r}")
    cls, fields = _KINDS[kind]
    missing = [f for f in fields if f not in obj]
    if missing:
        raise ValueError(f"{kind} service missing field(s) {missing}")
    args = [obj[f] for f in fields]
    if kind == "erlang":
        if int(args[0]) != args[0]:
            raise ValueError(f"erlang shape must be an integer, got {args[0]!r}")
        args[0] = int(args[0])
    return cls(*(a if isinstance(a, int) else float(a) for a in args))


def to_dict(d: ServiceDistribution) -> dict[str, Any]:
    if isinstance(d, Convolution):
        return {"kind": "convolution", "factors": [to_dict(f) for f in d.factors]}
    if isinstance(d, Mixture):
        return {
            "kind": "mixture",
            "components": [{"weight": w, "service": to_dict(c)} for w, c in d.components],
        }
    for kind, (cls, fields) in _KINDS.items():
        if type(d) is cls:
            return {"kind": kind, **{f: getattr(d, f) for f in fields}}
    raise TypeError(f"cannot serialize {d!r}")
