"""Full interferometer state and its detection statistics.

Source Q emits one particle into each of ``p0, p1, ..., pn``; source Q'
emits into ``p0'`` and into probe modes that have been made identical to
``p1 ... pn`` after the phase shifter and attenuators. The two emissions are
added coherently with weight ``1/sqrt(2)`` and relative phase ``xi``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .elements import (
    AttenuatorSpec,
    Port,
    difference_number_operator,
    emit_qprime_with_path_identity,
    expectation,
    interferometer_registry,
    output_field_operator,
    apply_field_operator,
    probe_mode,
)
from .fock import FockVector, Statistics, add, norm, normalize, product_state, scale

VISIBILITY_GRID_POINTS = 721


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Free parameters of one interferometer setting.

    ``transmissions`` defaults to lossless (all ones) when omitted; a single
    value is broadcast to every probe.
    """

    n: int
    xi: float = 0.0
    gamma: float = 0.0
    phi: float = 0.0
    transmissions: tuple[float, ...] | None = None
    statistics: Statistics = Statistics.BOSON

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        ts = self.transmissions
        if ts is None:
            ts = (1.0,) * self.n
        elif np.ndim(ts) == 0:
            ts = (float(ts),) * self.n
        ts = tuple(float(t) for t in ts)
        if len(ts) != self.n:
            raise ConfigError(f"expected {self.n} transmissions, got {len(ts)}")
        for l, t in enumerate(ts, start=1):
            if not 0.0 <= t <= 1.0:
                raise ConfigError(f"transmission T_{l}={t} outside [0, 1]")
        for name in ("xi", "gamma", "phi"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ConfigError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "transmissions", ts)
        object.__setattr__(self, "statistics", Statistics(self.statistics))

    @property
    def zeta0(self) -> float:
        return self.xi + self.gamma - math.pi / 2

    @property
    def attenuator(self) -> AttenuatorSpec:
        return AttenuatorSpec(self.transmissions)

    @property
    def transmission_product(self) -> float:
        return math.prod(self.transmissions)

    @property
    def lossless(self) -> bool:
        return all(t == 1.0 for t in self.transmissions)

    def at_phase(self, phi: float) -> ExperimentConfig:
        return replace(self, phi=phi)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "xi": self.xi,
            "gamma": self.gamma,
            "phi": self.phi,
            "transmissions": list(self.transmissions),
            "statistics": self.statistics.value,
        }


@dataclass(frozen=True)
class ObservableReport:
    mean_nC: float
    mean_nD: float
    mean_ndiff: float
    second_moment_ndiff: float
    var_ndiff: float
    visibility: float
    config: ExperimentConfig = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "mean_nC": self.mean_nC,
            "mean_nD": self.mean_nD,
            "mean_ndiff": self.mean_ndiff,
            "second_moment_ndiff": self.second_moment_ndiff,
            "var_ndiff": self.var_ndiff,
            "visibility": self.visibility,
            **self.config.as_dict(),
        }


@dataclass(frozen=True)
class VisibilityReport:
    closed_form: float
    measured: float
    p_max: float
    p_min: float


def build_source_state(cfg: ExperimentConfig, which: str) -> FockVector:
    """Emission of one source on its own: ``"Q"`` or ``"Q'"``."""
    registry = interferometer_registry(cfg.n)
    if which == "Q":
        modes = ["p0"] + [probe_mode(l) for l in range(1, cfg.n + 1)]
        return product_state(registry, cfg.statistics, modes)
    if which in ("Q'", "Qp", "Qprime"):
        return emit_qprime_with_path_identity(
            registry, cfg.statistics, cfg.phi, cfg.attenuator
        )
    raise ConfigError(f"unknown source {which!r}; expected 'Q' or \"Q'\"")


@lru_cache(maxsize=4096)
def build_state(cfg: ExperimentConfig) -> FockVector:
    q = build_source_state(cfg, "Q")
    qp = build_source_state(cfg, "Q'")
    s = 1 / math.sqrt(2)
    return normalize(add(scale(q, s), scale(qp, s * cmath.exp(1j * cfg.xi))))


def detection_probability(cfg: ExperimentConfig, port: Port | str) -> float:
    """Single-particle detection probability ``<E^- E^+>`` at output C or D."""
    field_plus = output_field_operator(port, cfg.gamma)
    return norm(apply_field_operator(field_plus, build_state(cfg))) ** 2


def mean_ndiff(cfg: ExperimentConfig) -> float:
    return expectation(difference_number_operator(cfg.gamma), build_state(cfg)).real


def ndiff_moments(cfg: ExperimentConfig) -> tuple[float, float]:
    """First and second moments of the difference number operator."""
    psi = build_state(cfg)
    ndiff = difference_number_operator(cfg.gamma)
    mean = expectation(ndiff, psi).real
    # the square is expanded as a product of full operator strings
    second = expectation(ndiff * ndiff, psi).real
    return mean, second


def n_diff_statistics(cfg: ExperimentConfig) -> ObservableReport:
    mean, second = ndiff_moments(cfg)
    return ObservableReport(
        mean_nC=detection_probability(cfg, Port.C),
        mean_nD=detection_probability(cfg, Port.D),
        mean_ndiff=mean,
        second_moment_ndiff=second,
        var_ndiff=max(second - mean * mean, 0.0),
        visibility=cfg.transmission_product,
        config=cfg,
    )


def phase_grid(points: int, phi_min: float = 0.0, phi_max: float = 2 * math.pi) -> np.ndarray:
    return np.linspace(phi_min, phi_max, points)


def fringe(cfg: ExperimentConfig, phis: Sequence[float], port: Port | str = Port.D) -> np.ndarray:
    return np.array([detection_probability(cfg.at_phase(float(p)), port) for p in phis])


def _refine_extremum(cfg: ExperimentConfig, phis: np.ndarray, k: int, sign: float) -> float:
    lo = phis[max(k - 1, 0)]
    hi = phis[min(k + 1, len(phis) - 1)]
    res = minimize_scalar(
        lambda p: sign * detection_probability(cfg.at_phase(p), Port.D),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return sign * float(res.fun)


def visibility(cfg: ExperimentConfig, points: int = VISIBILITY_GRID_POINTS) -> VisibilityReport:
    """Fringe contrast of output D, measured and as the transmission product.

    The measured value takes the extremes of the engine fringe on a grid over
    one full phase period and polishes each with a bounded local search, so
    it does not depend on the grid hitting a fringe peak.
    """
    phis = phase_grid(points)
    p = fringe(cfg, phis)
    kmax, kmin = int(np.argmax(p)), int(np.argmin(p))
    p_max = max(p[kmax], _refine_extremum(cfg, phis, kmax, -1.0))
    p_min = min(p[kmin], _refine_extremum(cfg, phis, kmin, 1.0))
    measured = (p_max - p_min) / (p_max + p_min)
    return VisibilityReport(
        closed_form=cfg.transmission_product,
        measured=float(measured),
        p_max=float(p_max),
        p_min=float(p_min),
    )
