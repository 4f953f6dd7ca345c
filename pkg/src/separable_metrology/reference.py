"""Closed-form detection statistics and phase uncertainty.

These functions evaluate the analytic results directly and never touch the
Fock-space engine, so they can serve as an independent cross-check of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


class DivergentUncertainty(ArithmeticError):
    """Phase uncertainty is infinite at this setting (fringe extremum or zero visibility)."""


@dataclass(frozen=True)
class ClosedFormInputs:
    n: int
    phi: float
    zeta0: float
    transmissions: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        ts = tuple(float(t) for t in self.transmissions) or (1.0,) * self.n
        if len(ts) != self.n:
            raise ValueError(f"expected {self.n} transmissions, got {len(ts)}")
        if any(not 0.0 <= t <= 1.0 for t in ts):
            raise ValueError(f"transmissions must lie in [0, 1]: {ts}")
        object.__setattr__(self, "transmissions", ts)

    @classmethod
    def from_phases(
        cls, n: int, phi: float, xi: float, gamma: float, transmissions: Sequence[float] = ()
    ) -> ClosedFormInputs:
        return cls(n, phi, xi + gamma - math.pi / 2, tuple(transmissions))

    @property
    def argument(self) -> float:
        return self.n * self.phi - self.zeta0


def cf_visibility(inputs: ClosedFormInputs) -> float:
    return math.prod(inputs.transmissions)


def cf_detection(inputs: ClosedFormInputs, port: str) -> float:
    """Probability of a click at output ``"C"`` (minus sign) or ``"D"``."""
    sign = {"C": -1.0, "D": 1.0}[str(getattr(port, "value", port))]
    return 0.5 * (1.0 + sign * cf_visibility(inputs) * math.cos(inputs.argument))


def cf_ndiff_mean(inputs: ClosedFormInputs) -> float:
    return math.cos(inputs.argument) * cf_visibility(inputs)


def cf_ndiff_var(inputs: ClosedFormInputs) -> float:
    v = cf_visibility(inputs)
    return 1.0 - math.cos(inputs.argument) ** 2 * v * v


def cf_ndiff_derivative(inputs: ClosedFormInputs) -> float:
    return -inputs.n * cf_visibility(inputs) * math.sin(inputs.argument)


def cf_delta_phi(inputs: ClosedFormInputs) -> float:
    """Error-propagation phase uncertainty at the given phase.

    Raises DivergentUncertainty where it is infinite. With unit visibility the
    removable singularity is taken, giving ``1/n`` at every phase.
    """
    v = cf_visibility(inputs)
    n = inputs.n
    if v == 1.0:
        return 1.0 / n
    if v == 0.0:
        raise DivergentUncertainty("zero visibility: the fringe carries no phase information")
    c = math.cos(inputs.argument)
    s2 = 1.0 - c * c
    if s2 <= 0.0:
        raise DivergentUncertainty(
            f"n*phi - zeta0 = {inputs.argument} sits on a fringe extremum"
        )
    return math.sqrt((1.0 - c * c * v * v) / (s2 * v * v)) / n


def cf_delta_phi_min(inputs: ClosedFormInputs) -> float:
    v = cf_visibility(inputs)
    if v == 0.0:
        raise DivergentUncertainty("zero visibility: the fringe carries no phase information")
    return 1.0 / (inputs.n * v)


def cf_optimal_phases(inputs: ClosedFormInputs) -> tuple[float, ...]:
    """Phases in [0, 2pi) where ``n*phi - zeta0 = pi/2 (mod pi)``."""
    n = inputs.n
    step = math.pi / n
    first = ((math.pi / 2 + inputs.zeta0) / n) % step
    return tuple(first + k * step for k in range(2 * n))


def heisenberg_limit(n: int) -> float:
    return 1.0 / n


def shot_noise_limit(n: int) -> float:
    return 1.0 / math.sqrt(n)


def feasibility_threshold(n: int) -> float:
    """Smallest visibility whose best uncertainty stays below 2*pi."""
    return 1.0 / (2 * n * math.pi)


def cf_sensing_entropy(inputs: ClosedFormInputs) -> float:
    """Entropy (nats) of the sensing pair, whose eigenvalues are (1 +- V)/2."""
    v = cf_visibility(inputs)
    return 0.0 - sum(p * math.log(p) for p in ((1 + v) / 2, (1 - v) / 2) if p > 0)
