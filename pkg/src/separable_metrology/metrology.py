"""Phase uncertainty by error propagation, its optimum over phase, and sweeps.

The engine route differentiates ``<n_diff>`` numerically. The closed forms in
:mod:`separable_metrology.reference` are exposed through
:func:`closed_form_uncertainty` for comparison only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import reference as ref
from .experiment import ExperimentConfig, mean_ndiff, ndiff_moments
from .fock import Statistics

FD_STEP = 1e-5
DERIVATIVE_FLOOR = 1e-12
OPTIMIZER_GRID_POINTS = 720
OPTIMIZER_XTOL = 1e-9
TIE_RTOL = 1e-9


class IndeterminateUncertainty(ArithmeticError):
    """The fringe slope vanishes, so error propagation gives no finite answer."""


class NoPhaseInformation(ValueError):
    """Zero fringe visibility: the measurement cannot resolve any phase."""


@dataclass(frozen=True)
class UncertaintyReport:
    phi: float
    delta_phi: float
    derivative: float
    delta_ndiff: float
    method: str  # "finite-difference" or "closed-form"


class PhaseOptimum(NamedTuple):
    phi: float
    delta_phi: float


class Feasibility(str, Enum):
    HEISENBERG = "heisenberg"
    SUPER_SENSITIVE = "super_sensitive"
    SUB_SNL_BUT_FEASIBLE = "sub_snl_but_feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SensitivityRow:
    n: int
    visibility: float
    phi_optimal: float
    delta_phi_min: float
    heisenberg: float
    shot_noise: float
    feasible: bool
    regime: Feasibility
    degenerate: bool

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["regime"] = self.regime.value
        return d


@dataclass(frozen=True)
class SensitivitySweep:
    rows: list[SensitivityRow] = field(default_factory=list)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]


def ndiff_derivative(cfg: ExperimentConfig, step: float = FD_STEP) -> float:
    """Slope of ``<n_diff>`` in phi: central difference plus one Richardson step."""

    def central(h: float) -> float:
        up = mean_ndiff(cfg.at_phase(cfg.phi + h))
        down = mean_ndiff(cfg.at_phase(cfg.phi - h))
        return (up - down) / (2 * h)

    coarse = central(step)
    fine = central(step / 2)
    return (4 * fine - coarse) / 3


def phase_uncertainty(cfg: ExperimentConfig, step: float = FD_STEP) -> UncertaintyReport:
    """Error-propagation uncertainty ``Delta n_diff / |d<n_diff>/dphi|`` at ``cfg.phi``.

    Raises:
        IndeterminateUncertainty: if the slope magnitude falls below 1e-12.
    """
    mean, second = ndiff_moments(cfg)
    delta_n = math.sqrt(max(second - mean * mean, 0.0))
    slope = ndiff_derivative(cfg, step)
    if abs(slope) < DERIVATIVE_FLOOR:
        raise IndeterminateUncertainty(
            f"indeterminate at fringe extremum: slope {slope:.3e} at phi={cfg.phi}"
        )
    return UncertaintyReport(
        phi=cfg.phi,
        delta_phi=delta_n / abs(slope),
        derivative=slope,
        delta_ndiff=delta_n,
        method="finite-difference",
    )


def _closed_form_inputs(cfg: ExperimentConfig) -> ref.ClosedFormInputs:
    return ref.ClosedFormInputs(cfg.n, cfg.phi, cfg.zeta0, cfg.transmissions)


def closed_form_uncertainty(cfg: ExperimentConfig) -> UncertaintyReport:
    """Analytic counterpart of :func:`phase_uncertainty`; infinite where it diverges."""
    inputs = _closed_form_inputs(cfg)
    try:
        delta = ref.cf_delta_phi(inputs)
    except ref.DivergentUncertainty:
        delta = math.inf
    return UncertaintyReport(
        phi=cfg.phi,
        delta_phi=delta,
        derivative=ref.cf_ndiff_derivative(inputs),
        delta_ndiff=math.sqrt(max(ref.cf_ndiff_var(inputs), 0.0)),
        method="closed-form",
    )


def _delta_or_inf(cfg: ExperimentConfig, phi: float) -> float:
    try:
        return phase_uncertainty(cfg.at_phase(phi)).delta_phi
    except IndeterminateUncertainty:
        return math.inf


def min_phase_uncertainty(
    cfg: ExperimentConfig, grid_points: int = OPTIMIZER_GRID_POINTS
) -> PhaseOptimum:
    """Minimize the engine phase uncertainty over phi in [0, 2pi).

    A coarse grid of ``<n_diff>`` and its second moment locates the best
    basin, a bounded Brent search refines it, and every zero crossing of
    ``<n_diff>`` is polished with a root finder and offered as a candidate.
    The smallest phi among candidates within a relative 1e-9 of the best
    value wins.

    Raises:
        NoPhaseInformation: if ``<n_diff>`` is flat (zero visibility).
    """
    dphi = 2 * math.pi / grid_points
    phis = np.arange(grid_points) * dphi
    moments = np.array([ndiff_moments(cfg.at_phase(float(p))) for p in phis])
    mean, second = moments[:, 0], moments[:, 1]
    if np.max(np.abs(mean)) < DERIVATIVE_FLOOR:
        raise NoPhaseInformation("no phase information (GHZ regime): visibility is zero")

    slope = (np.roll(mean, -1) - np.roll(mean, 1)) / (2 * dphi)
    spread = np.sqrt(np.clip(second - mean**2, 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        coarse = np.where(np.abs(slope) > DERIVATIVE_FLOOR, spread / np.abs(slope), np.inf)
    best = np.min(coarse)
    k = int(np.flatnonzero(coarse <= best * (1 + TIE_RTOL))[0])

    res = minimize_scalar(
        lambda p: _delta_or_inf(cfg, p),
        bounds=(phis[k] - dphi, phis[k] + dphi),
        method="bounded",
        options={"xatol": OPTIMIZER_XTOL},
    )
    candidates = [(float(res.x) % (2 * math.pi), float(res.fun))]

    def mean_at(p: float) -> float:
        return mean_ndiff(cfg.at_phase(p))

    for j in range(grid_points):
        if mean[j] * mean[(j + 1) % grid_points] > 0.0:
            continue
        a, b = float(phis[j]), float(phis[j] + dphi)
        # re-evaluate: the wrapped endpoint can differ from the grid value by rounding
        ma, mb = mean_at(a), mean_at(b)
        if ma == 0.0:
            root = a
        elif ma * mb < 0.0:
            root = brentq(mean_at, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        else:
            continue
        candidates.append((root % (2 * math.pi), _delta_or_inf(cfg, root)))

    value = min(c[1] for c in candidates)
    if not math.isfinite(value):
        raise NoPhaseInformation("no finite phase uncertainty anywhere on [0, 2pi)")
    phi_opt = min(p for p, d in candidates if d <= value * (1 + TIE_RTOL))
    return PhaseOptimum(float(phi_opt), float(value))


def feasibility(n: int, visibility: float) -> Feasibility:
    """Classify a setting against the Heisenberg, shot-noise and 2*pi bounds."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not 0.0 <= visibility <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {visibility}")
    if visibility == 1.0:
        return Feasibility.HEISENBERG
    if visibility <= ref.feasibility_threshold(n):
        return Feasibility.INFEASIBLE
    if n > 1 and visibility > ref.shot_noise_limit(n):
        return Feasibility.SUPER_SENSITIVE
    return Feasibility.SUB_SNL_BUT_FEASIBLE


def sensitivity_row(cfg: ExperimentConfig) -> SensitivityRow:
    v = cfg.transmission_product
    phi_opt, delta = min_phase_uncertainty(cfg)
    return SensitivityRow(
        n=cfg.n,
        visibility=v,
        phi_optimal=phi_opt,
        delta_phi_min=delta,
        heisenberg=ref.heisenberg_limit(cfg.n),
        shot_noise=ref.shot_noise_limit(cfg.n),
        feasible=v > ref.feasibility_threshold(cfg.n),
        regime=feasibility(cfg.n, v),
        degenerate=cfg.n == 1,
    )


def sweep_uncertainty_vs_n(
    n_max: int,
    transmission: float = 1.0,
    *,
    xi: float = 0.0,
    gamma: float = 0.0,
    statistics: Statistics = Statistics.BOSON,
) -> SensitivitySweep:
    """Best phase uncertainty for n = 1..n_max, every probe sharing one transmission."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    rows = [
        sensitivity_row(
            ExperimentConfig(n, xi=xi, gamma=gamma, transmissions=transmission, statistics=statistics)
        )
        for n in range(1, n_max + 1)
    ]
    return SensitivitySweep(rows)
