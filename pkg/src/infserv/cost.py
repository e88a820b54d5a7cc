"""Transport savings from lowering the transport probability, and investment screening.

Transport cost is taken as proportional to p. All money figures are flows
per year.
"""
from __future__ import annotations

from dataclasses import dataclass

__all__ = ["CostInputs", "Savings", "Viability", "differential_cost", "investment_viable"]


@dataclass(frozen=True)
class CostInputs:
    cost_per_year: float  # transport cost at the initial probability
    p_initial: float
    delta_p: float
    investment_per_year: float = 0.0

    def __post_init__(self):
        if self.cost_per_year < 0:
            raise ValueError(f"transport cost must be >= 0, got {self.cost_per_year}")
        if not 0 < self.p_initial <= 1:
            raise ValueError(f"initial p must lie in (0, 1], got {self.p_initial}")
        if self.delta_p < 0:
            raise ValueError(f"delta p must be >= 0, got {self.delta_p}")
        if self.delta_p > self.p_initial:
            raise ValueError(f"delta p {self.delta_p} exceeds initial p {self.p_initial}")
        if self.investment_per_year < 0:
            raise ValueError(f"investment must be >= 0, got {self.investment_per_year}")


@dataclass(frozen=True)
class Savings:
    delta_cost_per_year: float
    final_cost_per_year: float


@dataclass(frozen=True)
class Viability:
    viable: bool
    margin_per_year: float


def differential_cost(c: CostInputs) -> Savings:
    """Yearly transport savings c * dp / p and the remaining cost."""
    if c.delta_p == c.p_initial:
        return Savings(c.cost_per_year, 0.0)
    saved = c.cost_per_year * c.delta_p / c.p_initial
    return Savings(saved, max(c.cost_per_year - saved, 0.0))


def investment_viable(c: CostInputs) -> Viability:
    """Viable when the investment does not exceed the savings (ties pass)."""
    saved = differential_cost(c).delta_cost_per_year
    return Viability(c.investment_per_year <= saved, saved - c.investment_per_year)
