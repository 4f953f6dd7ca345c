"""Mode-partition reduced density matrices and entanglement entropy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .elements import SENSING_MODES
from .fock import FockError, FockVector, Statistics

EIGEN_CLAMP = 1e-12


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix on a subset of modes, in the occupation basis it touches."""

    modes: tuple[str, ...]
    basis: tuple[tuple[int, ...], ...]
    entries: np.ndarray

    def __post_init__(self) -> None:
        self.entries.setflags(write=False)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def element(self, bra: Iterable[int], ket: Iterable[int]) -> complex:
        i = self.basis.index(tuple(bra))
        j = self.basis.index(tuple(ket))
        return complex(self.entries[i, j])


def _reorder_sign(occ: tuple[int, ...], kept: set[int]) -> int:
    # parity of moving kept fermions in front of every occupied traced mode
    swaps = 0
    passed = 0
    for i, k in enumerate(occ):
        if not k:
            continue
        if i in kept:
            swaps += passed
        else:
            passed += 1
    return -1 if swaps & 1 else 1


def reduced_density_matrix(state: FockVector, keep: Iterable[str]) -> DensityMatrix:
    """Trace out every mode not in ``keep``.

    Fermionic amplitudes are first re-signed for the ordering in which the
    kept modes precede the traced ones; for bosons no sign arises.
    """
    keep = tuple(dict.fromkeys(keep))
    if not keep:
        raise FockError("reduced density matrix needs at least one kept mode")
    registry = state.registry
    keep_idx = [registry.position(m) for m in keep]
    kept = set(keep_idx)
    rest_idx = [i for i in range(len(registry)) if i not in kept]
    fermion = state.statistics is Statistics.FERMION

    # group amplitudes by environment configuration
    env: dict[tuple[int, ...], dict[tuple[int, ...], complex]] = {}
    for occ, amp in state.terms.items():
        sys_occ = tuple(occ[i] for i in keep_idx)
        env_occ = tuple(occ[i] for i in rest_idx)
        if fermion:
            amp = amp * _reorder_sign(occ, kept)
        env.setdefault(env_occ, {})[sys_occ] = amp

    basis = tuple(sorted({s for branch in env.values() for s in branch}))
    pos = {b: i for i, b in enumerate(basis)}
    rho = np.zeros((len(basis), len(basis)), dtype=complex)
    for branch in env.values():
        vec = np.zeros(len(basis), dtype=complex)
        for s, amp in branch.items():
            vec[pos[s]] = amp
        rho += np.outer(vec, vec.conj())
    tr = np.trace(rho).real
    if tr <= 0:
        raise FockError("cannot reduce the zero vector")
    return DensityMatrix(keep, basis, rho / tr)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in nats; eigenvalues below 1e-12 count as zero."""
    lam = rho.eigenvalues()
    return float(0.0 - sum(x * math.log(x) for x in lam if x >= EIGEN_CLAMP))


def entanglement_entropy(state: FockVector, partition: Iterable[str]) -> float:
    return von_neumann_entropy(reduced_density_matrix(state, partition))


def sensing_entropy(state: FockVector) -> float:
    """Entropy of the ``{p0, p0'}`` pair against all probe and loss modes."""
    return entanglement_entropy(state, SENSING_MODES)


def is_ghz_like(state: FockVector, atol: float = 1e-10) -> bool:
    """True when the sensing pair is maximally mixed (entropy ln 2)."""
    return abs(sensing_entropy(state) - math.log(2)) <= atol
