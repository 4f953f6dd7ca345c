import itertools
import math

import numpy as np
import pytest

from separable_metrology.fock import FockVector, ModeRegistry, Statistics

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str = "") -> None:
    """Log an acceptance verdict for the terminal summary, then assert it."""
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
    assert ok, f"{criterion}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_vector(rng, registry, stats, max_occ=2, n_terms=4):
    cap = 1 if stats is Statistics.FERMION else max_occ
    terms = {}
    for _ in range(n_terms):
        occ = tuple(int(k) for k in rng.integers(0, cap + 1, size=len(registry)))
        terms[occ] = complex(rng.normal(), rng.normal())
    return FockVector(registry, stats, terms)


# Dense reference representation, independent of the sparse engine.

def dense_ladder(num_modes: int, stats: Statistics, cutoff: int):
    """Dense creation matrices on the truncated product space.

    Bosons: tensor products of truncated sqrt ladders. Fermions: Jordan-Wigner
    strings with the first mode leftmost, matching the registry ordering.
    """
    d = 2 if stats is Statistics.FERMION else cutoff + 1
    single = np.diag(np.sqrt(np.arange(1, d)), -1).astype(complex)
    z = np.diag([(-1) ** k for k in range(d)]).astype(complex)
    eye = np.eye(d, dtype=complex)
    ops = []
    for m in range(num_modes):
        factors = []
        for j in range(num_modes):
            if j < m and stats is Statistics.FERMION:
                factors.append(z)
            elif j == m:
                factors.append(single)
            else:
                factors.append(eye)
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        ops.append(op)
    return ops, d


def to_dense(state: FockVector, d: int) -> np.ndarray:
    m = len(state.registry)
    vec = np.zeros(d**m, dtype=complex)
    for occ, amp in state.terms.items():
        idx = 0
        for k in occ:
            idx = idx * d + k
        vec[idx] = amp
    return vec


def from_dense(vec: np.ndarray, registry: ModeRegistry, stats: Statistics, d: int) -> FockVector:
    m = len(registry)
    terms = {}
    for idx, occ in enumerate(itertools.product(range(d), repeat=m)):
        if abs(vec[idx]) > 1e-15:
            terms[occ] = vec[idx]
    return FockVector(registry, stats, terms)


def brute_partial_trace(state: FockVector, keep_first: int) -> np.ndarray:
    """Trace out every mode after the first ``keep_first`` registry positions."""
    d = 1 + max(max(occ) for occ in state.terms)
    d = max(d, 2)
    m = len(state.registry)
    psi = to_dense(state, d).reshape(d**keep_first, d ** (m - keep_first))
    return psi @ psi.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def binary_entropy_nats(v: float) -> float:
    return -sum(p * math.log(p) for p in ((1 + v) / 2, (1 - v) / 2) if p > 0)
