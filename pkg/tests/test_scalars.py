from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvalgebra import ModeMismatch, NotInMaximalIdeal, PoleOverflow, RingMode, Scalar, SchemaError
from mvalgebra.scalars import in_maximal_ideal, scalar_arith, scalar_exp

HBAR3 = RingMode.hbar(3)
AUX = RingMode.hbar_aux(3, 3)
LAUR = RingMode.laurent_aux(3, 3, 2)


def test_truncated_product():
    R = RingMode.hbar(2)
    a = Scalar({(0, 0): 1, (1, 0): 1}, R)
    assert a * a == Scalar({(0, 0): 1, (1, 0): 2}, R)


def test_pole_overflow():
    R = RingMode.laurent_aux(2, 3, 1)
    a = Scalar({(-1, 1): 1}, R)
    with pytest.raises(PoleOverflow):
        a * a


def test_zero_product_never_overflows():
    # lambda^3 vanishes before the pole bound is consulted
    R = RingMode.laurent_aux(2, 2, 1)
    a = Scalar({(-1, 1): 1}, R)
    assert (a * a).is_zero()


def test_exact_cancellation():
    R = HBAR3
    a = Scalar({(0, 0): Fraction(1, 2), (1, 0): Fraction(1, 3)}, R)
    b = Scalar({(0, 0): Fraction(1, 2), (1, 0): Fraction(-1, 3)}, R)
    assert a + b == Scalar.one(R)
    assert (a + b).terms == {(0, 0): Fraction(1)}


def test_maximal_ideal_membership():
    assert Scalar.hbar(HBAR3).in_maximal_ideal()
    assert Scalar({(-1, 1): 1}, LAUR).in_maximal_ideal()
    assert not Scalar.hbar(LAUR, -1).in_maximal_ideal()
    assert not Scalar.one(HBAR3).in_maximal_ideal()
    assert Scalar.zero(RingMode.k()).in_maximal_ideal()
    assert in_maximal_ideal(Scalar.lam(AUX))


def test_exp_examples():
    assert scalar_exp(Scalar.zero(HBAR3)) == Scalar.one(HBAR3)
    assert scalar_exp(Scalar.hbar(HBAR3)) == Scalar({(0, 0): 1, (1, 0): 1, (2, 0): Fraction(1, 2)}, HBAR3)
    R = RingMode.laurent_aux(3, 3, 2)
    got = scalar_exp(Scalar({(-1, 1): 1}, R))
    assert got == Scalar({(0, 0): 1, (-1, 1): 1, (-2, 2): Fraction(1, 2)}, R)


def test_exp_outside_ideal_rejected():
    with pytest.raises(NotInMaximalIdeal):
        scalar_exp(Scalar.one(HBAR3))


def test_mixed_modes_rejected():
    with pytest.raises(ModeMismatch):
        Scalar.one(HBAR3) + Scalar.one(AUX)


def test_invalid_ring_modes():
    with pytest.raises(ValueError):
        RingMode.hbar(0)
    with pytest.raises(ValueError):
        RingMode("hbar", 2, 2, 0)


def test_nilpotency_index():
    assert RingMode.k().nilpotency_index() == 1
    assert RingMode.hbar(4).nilpotency_index() == 4
    assert RingMode.hbar_aux(3, 2).nilpotency_index() == 4
    assert RingMode.laurent_aux(6, 3, 2).nilpotency_index() == 3


def test_scalar_arith_dispatch():
    a, b = Scalar.hbar(HBAR3), Scalar.const(2, HBAR3)
    assert scalar_arith(a, b, "add") == a + b
    assert scalar_arith(a, b, "sub") == a - b
    assert scalar_arith(a, b, "mul") == a.scale(2)
    with pytest.raises(ValueError):
        scalar_arith(a, b, "div")


def test_json_round_trip_and_schema():
    s = Scalar({(-1, 1): Fraction(-3, 4), (2, 0): 5}, LAUR)
    assert Scalar.from_json(s.to_json(), LAUR) == s
    with pytest.raises(SchemaError):
        Scalar.from_json([{"h": 1, "q": "1/1"}], RingMode.k())
    with pytest.raises(SchemaError):
        Scalar.from_json([{"h": -1, "q": "1/1"}], HBAR3)


def test_hbar_shift_division():
    assert Scalar.hbar(HBAR3, 2).hbar_shift(-1) == Scalar.hbar(HBAR3)
    with pytest.raises(PoleOverflow):
        Scalar.one(HBAR3).hbar_shift(-1)


# ---------------------------------------------------------------- properties

_q = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def _scalars(ring: RingMode, ideal: bool = False):
    pairs = [(i, j) for i in range(-ring.P, ring.H) for j in range(ring.L)]
    if ideal:
        pairs = [p for p in pairs if ring.term_in_ideal(*p)]
    return st.dictionaries(st.sampled_from(pairs), _q, max_size=4).map(lambda d: Scalar(d, ring))


@pytest.mark.parametrize("ring", [HBAR3, AUX], ids=["hbar", "hbar-aux"])
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_ring_axioms(ring, data):
    a, b, c = (data.draw(_scalars(ring)) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + (-a) == Scalar.zero(ring)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_ring_axioms_laurent(data):
    # keep the poles shallow so products stay representable
    ring = RingMode.laurent_aux(3, 3, 2)
    pairs = [(i, j) for i in (-1, 0, 1) for j in range(3)]
    s = st.dictionaries(st.sampled_from(pairs), _q, max_size=3).map(lambda d: Scalar(d, ring))
    a, b = data.draw(s), data.draw(s)
    c = data.draw(st.dictionaries(st.sampled_from([(0, 0), (1, 0), (0, 1)]), _q, max_size=2)
                   .map(lambda d: Scalar(d, ring)))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@pytest.mark.parametrize("ring", [HBAR3, AUX, LAUR], ids=["hbar", "hbar-aux", "laurent"])
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_exp_is_multiplicative(ring, data):
    strat = _scalars(ring, ideal=True)
    if ring is LAUR:
        strat = st.dictionaries(st.sampled_from([(0, 1), (1, 1), (0, 2), (-1, 2)]), _q, max_size=3) \
            .map(lambda d: Scalar(d, ring))
    a, b = data.draw(strat), data.draw(strat)
    assert scalar_exp(a + b) == scalar_exp(a) * scalar_exp(b)


@pytest.mark.parametrize("ring", [HBAR3, AUX], ids=["hbar", "hbar-aux"])
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_maximal_ideal_is_an_ideal(ring, data):
    a, b = data.draw(_scalars(ring, ideal=True)), data.draw(_scalars(ring, ideal=True))
    c = data.draw(_scalars(ring))
    assert (a + b).in_maximal_ideal()
    assert (a * c).in_maximal_ideal()
