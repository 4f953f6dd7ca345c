"""Sparse occupation-number states and ladder operators for bosons and fermions.

A :class:`FockVector` is a map from occupation tuples to complex amplitudes.
Every tuple is indexed by the positions of a :class:`ModeRegistry`, which also
fixes the fermionic sign convention: creating or annihilating a fermion in a
mode picks up ``(-1)**(number of occupied modes before it in the registry)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

PRUNE_TOL = 1e-15
DEFAULT_MAX_OCCUPATION = 8


class FockError(ValueError):
    """Raised for invalid operations on Fock-space objects."""


class Statistics(str, Enum):
    BOSON = "boson"
    FERMION = "fermion"


@dataclass(frozen=True)
class ModeRegistry:
    """Ordered, immutable set of mode labels."""

    modes: tuple[str, ...]
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        modes = tuple(self.modes)
        if not modes:
            raise FockError("mode registry must be nonempty")
        if len(set(modes)) != len(modes):
            raise FockError(f"duplicate mode labels in {modes!r}")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(
            self, "index", MappingProxyType({m: i for i, m in enumerate(modes)})
        )

    def __len__(self) -> int:
        return len(self.modes)

    def __contains__(self, label: object) -> bool:
        return label in self.index

    def position(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise FockError(f"mode {label!r} is not registered") from None


class FockVector:
    """Immutable sparse superposition of occupation-number basis states."""

    __slots__ = ("registry", "statistics", "max_occupation", "_terms")

    def __init__(
        self,
        registry: ModeRegistry,
        statistics: Statistics,
        terms: Mapping[tuple[int, ...], complex] | None = None,
        max_occupation: int = DEFAULT_MAX_OCCUPATION,
    ) -> None:
        statistics = Statistics(statistics)
        cap = 1 if statistics is Statistics.FERMION else max_occupation
        clean: dict[tuple[int, ...], complex] = {}
        for occ, amp in (terms or {}).items():
            occ = tuple(int(k) for k in occ)
            if len(occ) != len(registry):
                raise FockError(
                    f"occupation {occ} does not match {len(registry)} registered modes"
                )
            if any(k < 0 or k > cap for k in occ):
                raise FockError(f"occupation {occ} outside [0, {cap}] for {statistics.value}")
            amp = complex(amp)
            if abs(amp) > PRUNE_TOL:
                clean[occ] = amp
        self.registry = registry
        self.statistics = statistics
        self.max_occupation = max_occupation
        self._terms = MappingProxyType(clean)

    @classmethod
    def _trusted(cls, like: FockVector, terms: dict) -> FockVector:
        # terms already validated and pruned by the caller
        out = object.__new__(cls)
        out.registry = like.registry
        out.statistics = like.statistics
        out.max_occupation = like.max_occupation
        out._terms = MappingProxyType(terms)
        return out

    @property
    def terms(self) -> Mapping[tuple[int, ...], complex]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def amplitude(self, occupations: Sequence[int]) -> complex:
        return self._terms.get(tuple(occupations), 0j)

    def __add__(self, other: FockVector) -> FockVector:
        return add(self, other)

    def __sub__(self, other: FockVector) -> FockVector:
        return add(self, scale(other, -1))

    def __mul__(self, c: complex) -> FockVector:
        return scale(self, c)

    __rmul__ = __mul__

    def __neg__(self) -> FockVector:
        return scale(self, -1)

    def __repr__(self) -> str:
        body = ", ".join(f"{occ}: {amp:.6g}" for occ, amp in sorted(self._terms.items()))
        return f"FockVector({self.statistics.value}, {{{body}}})"


def _check_compatible(a: FockVector, b: FockVector) -> None:
    if a.registry != b.registry:
        raise FockError("states live on different mode registries")
    if a.statistics is not b.statistics:
        raise FockError("states have different particle statistics")


def vacuum(
    registry: ModeRegistry,
    stats: Statistics,
    max_occupation: int = DEFAULT_MAX_OCCUPATION,
) -> FockVector:
    return FockVector(registry, stats, {(0,) * len(registry): 1.0}, max_occupation)


def basis_state(
    registry: ModeRegistry,
    stats: Statistics,
    occupations: Mapping[str, int],
    amplitude: complex = 1.0,
) -> FockVector:
    """Single basis term, occupations given by label (unlisted modes empty)."""
    occ = [0] * len(registry)
    for label, k in occupations.items():
        occ[registry.position(label)] = k
    return FockVector(registry, stats, {tuple(occ): amplitude})


def zero(registry: ModeRegistry, stats: Statistics) -> FockVector:
    return FockVector(registry, stats)


def apply_create(state: FockVector, mode: str) -> FockVector:
    """Apply a creation operator on ``mode``; the result is not renormalized."""
    i = state.registry.position(mode)
    out: dict[tuple[int, ...], complex] = {}
    if state.statistics is Statistics.FERMION:
        for occ, amp in state._terms.items():
            if occ[i]:
                continue
            if sum(occ[:i]) & 1:
                amp = -amp
            out[occ[:i] + (1,) + occ[i + 1 :]] = amp
    else:
        cap = state.max_occupation
        for occ, amp in state._terms.items():
            k = occ[i] + 1
            if k > cap:
                raise FockError(
                    f"occupation of {mode!r} would exceed the cap of {cap}"
                )
            out[occ[:i] + (k,) + occ[i + 1 :]] = amp * math.sqrt(k)
    return FockVector._trusted(state, out)


def apply_annihilate(state: FockVector, mode: str) -> FockVector:
    """Apply an annihilation operator on ``mode``; empty modes give zero."""
    i = state.registry.position(mode)
    out: dict[tuple[int, ...], complex] = {}
    fermion = state.statistics is Statistics.FERMION
    for occ, amp in state._terms.items():
        k = occ[i]
        if not k:
            continue
        if fermion:
            if sum(occ[:i]) & 1:
                amp = -amp
        else:
            amp = amp * math.sqrt(k)
        out[occ[:i] + (k - 1,) + occ[i + 1 :]] = amp
    return FockVector._trusted(state, out)


def add(a: FockVector, b: FockVector) -> FockVector:
    _check_compatible(a, b)
    out = dict(a._terms)
    for occ, amp in b._terms.items():
        s = out.get(occ, 0j) + amp
        if abs(s) > PRUNE_TOL:
            out[occ] = s
        else:
            out.pop(occ, None)
    return FockVector._trusted(a, out)


def superpose(states: Iterable[FockVector]) -> FockVector:
    states = list(states)
    if not states:
        raise FockError("cannot superpose an empty collection of states")
    out = states[0]
    for s in states[1:]:
        out = add(out, s)
    return out


def scale(a: FockVector, c: complex) -> FockVector:
    c = complex(c)
    out = {}
    for occ, amp in a._terms.items():
        v = amp * c
        if abs(v) > PRUNE_TOL:
            out[occ] = v
    return FockVector._trusted(a, out)


def inner_product(a: FockVector, b: FockVector) -> complex:
    """Return <a|b>, conjugate-linear in ``a``."""
    _check_compatible(a, b)
    small, large = (a._terms, b._terms) if len(a) <= len(b) else (b._terms, a._terms)
    total = 0j
    if small is a._terms:
        for occ, amp in small.items():
            other = large.get(occ)
            if other is not None:
                total += amp.conjugate() * other
    else:
        for occ, amp in small.items():
            other = large.get(occ)
            if other is not None:
                total += other.conjugate() * amp
    return total


def norm(a: FockVector) -> float:
    return math.sqrt(math.fsum(abs(v) ** 2 for v in a._terms.values()))


def normalize(a: FockVector) -> FockVector:
    nrm = norm(a)
    if nrm <= PRUNE_TOL:
        raise FockError("cannot normalize the zero vector")
    return scale(a, 1.0 / nrm)


def product_state(
    registry: ModeRegistry,
    stats: Statistics,
    modes: Sequence[str],
    max_occupation: int = DEFAULT_MAX_OCCUPATION,
) -> FockVector:
    """Return ``a†(modes[0]) a†(modes[1]) ... |vac>``.

    Creations act right to left, so the last listed mode is filled first.
    """
    stats = Statistics(stats)
    if stats is Statistics.FERMION and len(set(modes)) != len(modes):
        raise FockError(f"fermionic product state with a repeated mode: {list(modes)}")
    state = vacuum(registry, stats, max_occupation)
    for m in reversed(modes):
        state = apply_create(state, m)
    return state


def phase_factor(theta: float) -> complex:
    return cmath.exp(1j * theta)
