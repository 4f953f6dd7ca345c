import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from separable_metrology.fock import (
    FockError,
    FockVector,
    ModeRegistry,
    Statistics,
    add,
    apply_annihilate,
    apply_create,
    basis_state,
    inner_product,
    norm,
    normalize,
    product_state,
    scale,
    vacuum,
)

from conftest import dense_ladder, to_dense

R2 = ModeRegistry(("m1", "m2"))
R1 = ModeRegistry(("m",))
B, F = Statistics.BOSON, Statistics.FERMION


def test_registry_rejects_duplicates_and_empty():
    with pytest.raises(FockError):
        ModeRegistry(("a", "a"))
    with pytest.raises(FockError):
        ModeRegistry(())
    assert R2.position("m2") == 1
    with pytest.raises(FockError):
        R2.position("nope")


@pytest.mark.parametrize("stats", [B, F])
def test_vacuum(stats):
    v = vacuum(R2, stats)
    assert dict(v.terms) == {(0, 0): 1 + 0j}
    assert norm(v) == 1.0


def test_create_on_vacuum():
    out = apply_create(vacuum(R1, B), "m")
    assert dict(out.terms) == {(1,): 1}


def test_boson_create_sqrt_factor():
    out = apply_create(FockVector(R1, B, {(1,): 1}), "m")
    assert out.amplitude((2,)) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_fermion_create_is_nilpotent_on_occupied_mode():
    out = apply_create(FockVector(R1, F, {(1,): 1}), "m")
    assert out.is_zero()


def test_fermion_ordering_sign():
    vac = vacuum(R2, F)
    a = apply_create(apply_create(vac, "m2"), "m1")  # a†(m1) a†(m2)|vac>
    b = apply_create(apply_create(vac, "m1"), "m2")  # a†(m2) a†(m1)|vac>
    assert dict(a.terms) == {(1, 1): 1}
    assert dict(b.terms) == {(1, 1): -1}


def test_annihilate_examples():
    assert apply_annihilate(vacuum(R1, B), "m").is_zero()
    out = apply_annihilate(FockVector(R1, B, {(2,): 1}), "m")
    assert out.amplitude((1,)) == pytest.approx(math.sqrt(2), abs=1e-15)
    out = apply_annihilate(FockVector(R2, F, {(1, 1): 1}), "m2")
    assert dict(out.terms) == {(1, 0): -1}


def test_unregistered_mode_errors():
    with pytest.raises(FockError):
        apply_create(vacuum(R1, B), "x")
    with pytest.raises(FockError):
        apply_annihilate(vacuum(R1, B), "x")


def test_occupation_cap():
    v = FockVector(R1, B, {(3,): 1}, max_occupation=3)
    with pytest.raises(FockError):
        apply_create(v, "m")
    with pytest.raises(FockError):
        FockVector(R1, F, {(2,): 1})


def test_linear_algebra_examples():
    x = normalize(FockVector(R2, B, {(1, 0): 1, (0, 1): 1j}))
    assert inner_product(x, x) == pytest.approx(1, abs=1e-15)
    a = basis_state(R2, B, {"m1": 1})
    assert add(a, scale(a, -1)).is_zero()
    assert inner_product(basis_state(R2, B, {"m1": 1}), basis_state(R2, B, {"m2": 1})) == 0
    with pytest.raises(FockError):
        normalize(FockVector(R2, B))
    with pytest.raises(FockError):
        add(vacuum(R2, B), vacuum(R2, F))
    with pytest.raises(FockError):
        inner_product(vacuum(R2, B), vacuum(R1, B))


def test_product_state_examples():
    reg = ModeRegistry(("p0", "p1", "p2"))
    for stats in (B, F):
        s = product_state(reg, stats, ["p0", "p1", "p2"])
        assert dict(s.terms) == {(1, 1, 1): 1}
        assert dict(product_state(reg, stats, []).terms) == {(0, 0, 0): 1}
    s = product_state(R1, B, ["m", "m"])
    assert s.amplitude((2,)) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert norm(normalize(s)) == pytest.approx(1, abs=1e-15)
    with pytest.raises(FockError):
        product_state(R2, F, ["m1", "m1"])


def test_pruning_of_rounding_zeros():
    v = FockVector(R1, B, {(0,): 1e-16, (1,): 1})
    assert len(v) == 1


@pytest.mark.parametrize("stats,cutoff", [(B, 3), (F, 1)])
def test_ladders_agree_with_dense_matrices(rng, stats, cutoff):
    reg = ModeRegistry(("a", "b", "c"))
    creators, d = dense_ladder(3, stats, cutoff)
    for _ in range(20):
        terms = {}
        for _ in range(5):
            occ = tuple(int(k) for k in rng.integers(0, cutoff, size=3))
            terms[occ] = complex(rng.normal(), rng.normal())
        v = FockVector(reg, stats, terms)
        for i, m in enumerate(reg.modes):
            got = to_dense(apply_create(v, m), d)
            np.testing.assert_allclose(got, creators[i] @ to_dense(v, d), atol=1e-13)
            got = to_dense(apply_annihilate(v, m), d)
            np.testing.assert_allclose(got, creators[i].conj().T @ to_dense(v, d), atol=1e-13)


# property tests ----------------------------------------------------------

REG3 = ModeRegistry(("x", "y", "z"))
amp = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


@st.composite
def fock_vectors(draw, stats):
    cap = 1 if stats is F else 3
    occ = st.tuples(*[st.integers(0, cap)] * 3)
    terms = draw(st.dictionaries(occ, amp, min_size=1, max_size=6))
    return FockVector(REG3, stats, terms)


def _close(u: FockVector, v: FockVector, tol=1e-12) -> bool:
    diff = add(u, scale(v, -1))
    return norm(diff) <= tol * max(1.0, norm(u), norm(v))


@pytest.mark.parametrize("stats", [B, F])
@settings(max_examples=150, deadline=None)
@given(data=st.data(), j=st.sampled_from(REG3.modes), k=st.sampled_from(REG3.modes))
def test_canonical_relations(stats, data, j, k):
    v = data.draw(fock_vectors(stats))
    first = apply_annihilate(apply_create(v, k), j)
    second = apply_create(apply_annihilate(v, j), k)
    sign = -1 if stats is B else 1
    lhs = add(first, scale(second, sign))
    rhs = v if j == k else FockVector(REG3, stats)
    assert _close(lhs, rhs)


@settings(max_examples=100, deadline=None)
@given(data=st.data(), m=st.sampled_from(REG3.modes))
def test_fermion_nilpotency(data, m):
    v = data.draw(fock_vectors(F))
    assert apply_create(apply_create(v, m), m).is_zero()
    assert apply_annihilate(apply_annihilate(v, m), m).is_zero()


@pytest.mark.parametrize("stats", [B, F])
@settings(max_examples=100, deadline=None)
@given(data=st.data(), m=st.sampled_from(REG3.modes))
def test_adjointness(stats, data, m):
    x = data.draw(fock_vectors(stats))
    y = data.draw(fock_vectors(stats))
    lhs = inner_product(apply_create(x, m), y)
    rhs = inner_product(x, apply_annihilate(y, m))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, norm(x) * norm(y) * 4)


@settings(max_examples=100, deadline=None)
@given(data=st.data(), theta=st.floats(-10, 10))
def test_unit_phase_preserves_norm(data, theta):
    v = data.draw(fock_vectors(B))
    assert norm(scale(v, cmath.exp(1j * theta))) == pytest.approx(norm(v), rel=1e-12)


def test_vectors_are_immutable():
    v = vacuum(R1, B)
    with pytest.raises(TypeError):
        v.terms[(1,)] = 1
