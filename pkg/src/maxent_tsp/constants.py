"""Constant schedule used by the edge-classification and event bounds.

Everything is derived from the near-minimum-cut slack eta and the
half-edge window; the payment rate at the bottom is the product of the
classification probability floor, the window fractions and the reduction
step ratio.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RuleConstants:
    eta: float = 1e-3
    eps_half: float = 0.0002

    @property
    def eps_eta(self) -> float:
        return 14.0 * self.eta

    @property
    def eps_one_one(self) -> float:
        return self.eps_half / 12.0

    @property
    def p_good(self) -> float:
        return 0.005 * self.eps_half ** 2

    @property
    def eps_m(self) -> float:
        return 1.0 / 4000.0

    @property
    def beta(self) -> float:
        return self.eta / 8.0

    @property
    def tau(self) -> float:
        return 0.571 * self.beta

    @property
    def eps_p(self) -> float:
        return 3.9e-17

    def eps_p_derived(self) -> float:
        """Recompute the payment rate from its factors (>= eps_p)."""
        return (self.eps_one_one / 6.0) * self.p_good * (self.tau / self.eta)

    def to_json(self) -> dict:
        return {
            "eta": self.eta,
            "eps_eta": self.eps_eta,
            "eps_half": self.eps_half,
            "eps_one_one": self.eps_one_one,
            "p_good": self.p_good,
            "eps_m": self.eps_m,
            "beta": self.beta,
            "tau": self.tau,
            "eps_p": self.eps_p,
            "eps_p_derived": self.eps_p_derived(),
        }
