"""Circuit primitives: phase shifter, lossy path identity, output beamsplitter.

Mode labels used throughout the package:

* ``p0`` and ``p0'``: the two sensing modes combined at the beamsplitter,
* ``p1 ... pn``: probe modes that pick up the phase,
* ``loss1 ... lossn``: the vacuum port of the attenuator on each probe.

:func:`interferometer_registry` interleaves probe and loss modes
(``p0, p0', p1, loss1, p2, loss2, ...``). With this order the emission of
source Q' carries the same signs for fermions as for bosons.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence

from .fock import (
    FockError,
    FockVector,
    ModeRegistry,
    PRUNE_TOL,
    Statistics,
    add,
    apply_annihilate,
    apply_create,
    inner_product,
    scale,
    vacuum,
)

SENSING_MODES = ("p0", "p0'")


def probe_mode(l: int) -> str:
    return f"p{l}"


def loss_mode(l: int) -> str:
    return f"loss{l}"


@lru_cache(maxsize=None)
def interferometer_registry(n: int) -> ModeRegistry:
    if n < 1:
        raise FockError(f"need at least one probe particle, got n={n}")
    modes = ["p0", "p0'"]
    for l in range(1, n + 1):
        modes += [probe_mode(l), loss_mode(l)]
    return ModeRegistry(tuple(modes))


class Ladder(str, Enum):
    CREATE = "create"
    ANNIHILATE = "annihilate"

    def dagger(self) -> Ladder:
        return Ladder.ANNIHILATE if self is Ladder.CREATE else Ladder.CREATE


Factor = tuple[str, Ladder]


def cr(mode: str) -> Factor:
    return (mode, Ladder.CREATE)


def an(mode: str) -> Factor:
    return (mode, Ladder.ANNIHILATE)


class FieldOperator:
    """Linear combination of ladder-operator strings.

    Each term is ``(coefficient, factors)``; factors are written left to
    right as in the algebra and act on a state right to left. Terms with the
    same factor string are merged, but factors are never reordered.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[tuple[complex, Sequence[Factor]]] = ()) -> None:
        merged: dict[tuple[Factor, ...], complex] = {}
        for coeff, factors in terms:
            key = tuple((m, Ladder(kind)) for m, kind in factors)
            merged[key] = merged.get(key, 0j) + complex(coeff)
        self._terms = tuple(
            (c, f) for f, c in merged.items() if abs(c) > PRUNE_TOL
        )

    @classmethod
    def identity(cls) -> FieldOperator:
        return cls([(1.0, ())])

    @classmethod
    def number(cls, mode: str) -> FieldOperator:
        return cls([(1.0, (cr(mode), an(mode)))])

    @property
    def terms(self) -> tuple[tuple[complex, tuple[Factor, ...]], ...]:
        return self._terms

    def modes(self) -> set[str]:
        return {m for _, factors in self._terms for m, _ in factors}

    def adjoint(self) -> FieldOperator:
        return FieldOperator(
            (c.conjugate(), tuple((m, k.dagger()) for m, k in reversed(f)))
            for c, f in self._terms
        )

    def __add__(self, other: FieldOperator) -> FieldOperator:
        return FieldOperator(self._terms + other._terms)

    def __sub__(self, other: FieldOperator) -> FieldOperator:
        return self + other * -1

    def __mul__(self, other):
        if isinstance(other, FieldOperator):
            return FieldOperator(
                (c1 * c2, f1 + f2) for c1, f1 in self._terms for c2, f2 in other._terms
            )
        c = complex(other)
        return FieldOperator((c * k, f) for k, f in self._terms)

    def __rmul__(self, other):
        return self * other

    def __matmul__(self, state: FockVector) -> FockVector:
        return apply_field_operator(self, state)

    def __repr__(self) -> str:
        def fmt(f):
            return " ".join(
                f"a†({m})" if k is Ladder.CREATE else f"a({m})" for m, k in f
            ) or "1"

        return " + ".join(f"({c:.6g}) {fmt(f)}" for c, f in self._terms) or "0"


def apply_field_operator(op: FieldOperator, state: FockVector) -> FockVector:
    missing = [m for m in op.modes() if m not in state.registry]
    if missing:
        raise FockError(f"operator acts on unregistered modes {sorted(missing)}")
    result: FockVector | None = None
    for coeff, factors in op.terms:
        v = state
        for mode, kind in reversed(factors):
            v = apply_create(v, mode) if kind is Ladder.CREATE else apply_annihilate(v, mode)
            if v.is_zero():
                break
        v = scale(v, coeff)
        result = v if result is None else add(result, v)
    if result is None:
        return FockVector(state.registry, state.statistics, max_occupation=state.max_occupation)
    return result


def expectation(op: FieldOperator, state: FockVector) -> complex:
    """<state| op |state>."""
    return inner_product(state, apply_field_operator(op, state))


def phase_shift(state: FockVector, mode: str, phi: float) -> FockVector:
    """Multiply every term by ``exp(i*phi*k)``, k the occupation of ``mode``."""
    i = state.registry.position(mode)
    out = {}
    for occ, amp in state.terms.items():
        k = occ[i]
        out[occ] = amp * cmath.exp(1j * phi * k) if k else amp
    return FockVector(state.registry, state.statistics, out, state.max_occupation)


@dataclass(frozen=True)
class AttenuatorSpec:
    """Amplitude transmissions of the per-probe attenuators."""

    transmissions: tuple[float, ...]

    def __post_init__(self) -> None:
        ts = tuple(float(t) for t in self.transmissions)
        for l, t in enumerate(ts, start=1):
            if not 0.0 <= t <= 1.0 or math.isnan(t):
                raise FockError(f"transmission T_{l}={t} outside [0, 1]")
        object.__setattr__(self, "transmissions", ts)

    @property
    def reflections(self) -> tuple[float, ...]:
        return tuple(math.sqrt(1.0 - t * t) for t in self.transmissions)

    def __len__(self) -> int:
        return len(self.transmissions)


def lossy_probe_creation(l: int, transmission: float, phi: float) -> FieldOperator:
    """``exp(-i phi) [T a†(p_l) + R a†(loss_l)]``; T=1 is plain path identity."""
    r = math.sqrt(1.0 - transmission * transmission)
    ph = cmath.exp(-1j * phi)
    return FieldOperator(
        [(ph * transmission, (cr(probe_mode(l)),)), (ph * r, (cr(loss_mode(l)),))]
    )


@lru_cache(maxsize=256)
def _qprime_branches(
    registry: ModeRegistry, stats: Statistics, transmissions: tuple[float, ...]
) -> FockVector:
    state = vacuum(registry, stats)
    for l in range(len(transmissions), 0, -1):
        state = apply_field_operator(lossy_probe_creation(l, transmissions[l - 1], 0.0), state)
    return apply_create(state, "p0'")


def emit_qprime_with_path_identity(
    registry: ModeRegistry,
    stats: Statistics,
    phi: float,
    attenuator: AttenuatorSpec | Sequence[float],
) -> FockVector:
    """State emitted by Q' alone once its probe modes are identified with Q's.

    Builds ``a†(p0') prod_l exp(-i phi)[T_l a†(p_l) + R_l a†(loss_l)] |vac>``.
    """
    if not isinstance(attenuator, AttenuatorSpec):
        attenuator = AttenuatorSpec(tuple(attenuator))
    n = len(attenuator)
    for l in range(1, n + 1):
        for m in (probe_mode(l), loss_mode(l)):
            registry.position(m)
    # each probe factor carries exp(-i phi); the scalars pull out of the product
    branches = _qprime_branches(registry, Statistics(stats), attenuator.transmissions)
    return scale(branches, cmath.exp(-1j * n * phi))


class Port(str, Enum):
    C = "C"
    D = "D"


def output_field_operator(port: Port | str, gamma: float) -> FieldOperator:
    """Positive-frequency field at a symmetric lossless beamsplitter output.

    ``E_C = [a(p0) + i e^{i gamma} a(p0')]/sqrt2`` and
    ``E_D = [i a(p0) + e^{i gamma} a(p0')]/sqrt2``.
    """
    port = Port(port)
    s = 1 / math.sqrt(2)
    eg = cmath.exp(1j * gamma)
    if port is Port.C:
        coeffs = (s, 1j * eg * s)
    else:
        coeffs = (1j * s, eg * s)
    return FieldOperator([(coeffs[0], (an("p0"),)), (coeffs[1], (an("p0'"),))])


def port_number_operator(port: Port | str, gamma: float) -> FieldOperator:
    e = output_field_operator(port, gamma)
    return e.adjoint() * e


def difference_number_operator(gamma: float) -> FieldOperator:
    return port_number_operator(Port.D, gamma) - port_number_operator(Port.C, gamma)

