from __future__ import annotations

import random
from fractions import Fraction

import pytest

from mvalgebra import (
    GradedBasis,
    MasterCandidate,
    ModeMismatch,
    NotAMorphism,
    NotASolution,
    NotDegreeZero,
    NotInMaximalIdeal,
    NotPrimitive,
    RingMode,
    Scalar,
    SymmetricMVAlgebra,
    algebra_exp,
    at_most_simple_pole,
    diamond,
    higher_derived_bracket,
    is_mv_morphism,
    is_qme_solution,
    make_supertrivial,
    mc_residual,
    morphism_to_solution,
    mv_unit,
    phi_n,
    pushforward,
    solution_to_morphism,
    solve_qme_by_order,
    transfer_check,
    zero_map,
)
from mvalgebra.graded import Element, TensorSpace, tensor_elements
from mvalgebra.qme import (
    derived_bracket_identity,
    is_primitive,
    pushforward_via_diamond,
    qme_report,
    solution_set,
    transfer_sides,
)
from mvalgebra.symalg import derivation
from mvalgebra.testing import example_bv_algebra, random_ibl_morphism, random_morphism_by_conjugation

AUX = RingMode.hbar_aux(2, 3)
LAUR = RingMode.laurent_aux(6, 3, 2)


def _supertrivial(with_delta: bool = True, ring=AUX):
    V = GradedBasis.of([("1", 0), ("x", 0), ("y", 1)])
    return make_supertrivial(V, {"1": 1}, "1", {"x": {"y": 1}} if with_delta else None, ring)


def _lam(A, key, coeff=1, ring=None):
    ring = ring or A.ring
    return Element(A, {key: Scalar.monomial(coeff, 0, 1, ring)})


# ---------------------------------------------------------------- candidates

def test_candidate_validation():
    A = _supertrivial()
    with pytest.raises(NotDegreeZero):
        MasterCandidate(_lam(A, 2))
    with pytest.raises(NotInMaximalIdeal):
        MasterCandidate(Element(A, {1: 1}))
    with pytest.raises(ModeMismatch):
        MasterCandidate(_lam(A, 1), laurent_form=True)


def test_candidate_json_round_trip():
    A = example_bv_algebra(LAUR)
    St = Element(A, {A.monomial("x", "y"): Scalar({(-1, 1): 2, (1, 2): Fraction(1, 3)}, LAUR)})
    c = MasterCandidate(St, laurent_form=True)
    assert MasterCandidate.from_json(A, c.to_json()) == c
    assert c.S == St.map_coeffs(lambda s: s.hbar_shift(-1))


def test_algebra_exp_examples():
    A = _supertrivial()
    assert algebra_exp(A.zero()) == A.one()
    S = _lam(A, 1)
    assert algebra_exp(S) == A.one() + S


def test_exp_of_primitive_is_group_like():
    ring = RingMode.hbar_aux(2, 3)
    A = SymmetricMVAlgebra.free([("a", 0), ("b", 0)], 4, ring)
    S = Element(A, {A.monomial("a"): Scalar.lam(ring), A.monomial("b"): Scalar({(1, 1): 3}, ring)})
    assert is_primitive(A, S)
    E = algebra_exp(S)
    T = TensorSpace(A, A)
    assert Element(T, A.comul(E)) == tensor_elements(E, E)


def test_qme_examples():
    assert is_qme_solution(_lam(_supertrivial(with_delta=False), 1))
    A = _supertrivial()
    S = _lam(A, 1)
    assert not is_qme_solution(S)
    rep = qme_report(S)
    assert rep["witness"] == {"monomial": "y", "coefficient": Scalar.lam(AUX).to_json()}
    assert is_qme_solution(A.zero())


# ---------------------------------------------------------------- solutions and morphisms

def test_zero_solution_is_zero_morphism():
    A = _supertrivial()
    s = solution_to_morphism(A.zero())
    assert not s.images
    assert morphism_to_solution(s).element == A.zero()


def test_round_trip_on_generated_solutions():
    rng = random.Random(1)
    for trial in range(8):
        A = _supertrivial(ring=RingMode.hbar_aux(rng.randint(1, 2), 3))
        for S in solution_set(A, 4, seed=trial):
            s = solution_to_morphism(S)
            assert is_mv_morphism(s)
            assert morphism_to_solution(s) == S


def test_non_solution_rejected():
    A = _supertrivial()
    with pytest.raises(NotASolution):
        solution_to_morphism(_lam(A, 1))


def test_morphism_to_solution_needs_ground_source():
    A = _supertrivial()
    with pytest.raises(NotAMorphism):
        morphism_to_solution(zero_map(A, A))


def test_solver_finds_nonzero_solutions():
    A = _supertrivial()
    found = [S for S in solution_set(A, 6, seed=3) if S.element.terms]
    assert found
    for S in found:
        assert is_qme_solution(S)
    with pytest.raises(ModeMismatch):
        solve_qme_by_order(_supertrivial(ring=RingMode.hbar(2)))


# ---------------------------------------------------------------- derived brackets

def test_first_order_delta_has_no_higher_brackets():
    A0 = SymmetricMVAlgebra.free([("x", 0), ("y", 1), ("z", 0)], 4, LAUR)
    Q = derivation(A0.sym, {"x": A0.gen("y")}, 1)
    A = SymmetricMVAlgebra(A0.sym, Q.images)
    St = Element(A, {A.monomial("x"): Scalar.lam(LAUR), A.monomial("x", "z"): Scalar({(1, 1): 2}, LAUR)})
    assert higher_derived_bracket(A, 2, [St, St]).is_zero()
    assert mc_residual(A, St) == A.Delta(St)


def test_second_bracket_formula():
    A = example_bv_algebra(LAUR)
    x, xi = A.gen("x"), A.gen("xi")
    l2 = higher_derived_bracket(A, 2, [x, xi])
    D = A.Delta
    phi2 = D(A.mul(x, xi)) - A.mul(D(x), xi) - A.mul(x, D(xi))
    assert phi2 == phi_n(A, [x, xi])
    assert l2 == phi2.map_coeffs(lambda c: c.hbar_shift(-1))
    assert l2 == A.one()


def test_brackets_are_graded_symmetric():
    A = example_bv_algebra(LAUR)
    rng = random.Random(2)
    gens = [A.gen(n) for n in ("x", "xi", "y", "eta")]
    for _ in range(30):
        a, b, c = (rng.choice(gens) for _ in range(3))
        da, db = (next(iter(e.degrees())) for e in (a, b))
        sign = -1 if (da * db) & 1 else 1
        assert higher_derived_bracket(A, 2, [a, b]) == higher_derived_bracket(A, 2, [b, a]).scale(sign)
        dc = next(iter(c.degrees()))
        sign3 = -1 if (db * dc) & 1 else 1
        assert higher_derived_bracket(A, 3, [a, b, c]) == higher_derived_bracket(A, 3, [a, c, b]).scale(sign3)


def test_residual_vanishes_exactly_on_solutions():
    A = example_bv_algebra(LAUR)
    x, y = A.monomial("x"), A.monomial("y")
    lam = Scalar.lam(LAUR)
    cases = [
        (Element(A, {x: lam}), True),
        (Element(A, {A.monomial("x", "x"): lam}), True),
        (Element(A, {y: lam}), False),
        # neither d/dy nor d/dx touches xi eta
        (Element(A, {A.monomial("xi", "eta"): lam}), True),
        # each summand solves, the sum does not: l_2(x, xi eta) = eta
        (Element(A, {A.monomial("xi", "eta"): lam, x: lam}), False),
        (Element(A, {A.monomial("x", "y"): Scalar({(1, 1): 1}, LAUR)}), False),
    ]
    for St, solves in cases:
        lhs, rhs = derived_bracket_identity(A, St)
        assert lhs == rhs
        assert (not mc_residual(A, St).terms) == solves
        assert is_qme_solution(MasterCandidate(St, laurent_form=True)) == solves


def test_brackets_need_laurent_mode():
    A = example_bv_algebra(RingMode.hbar_aux(2, 2))
    with pytest.raises(ModeMismatch):
        higher_derived_bracket(A, 2, [A.gen("x"), A.gen("xi")])


def test_at_most_simple_pole():
    A = example_bv_algebra(LAUR)
    assert at_most_simple_pole(Element(A, {A.monomial("x"): Scalar({(-1, 1): 1}, LAUR)}))
    assert not at_most_simple_pole(Element(A, {A.monomial("x"): Scalar({(-2, 1): 1}, LAUR)}))


# ---------------------------------------------------------------- push-forward and transfer

def test_pushforward_along_unit_is_identity():
    A = _supertrivial()
    for S in solution_set(A, 4, seed=5):
        assert pushforward(mv_unit(A), S) == S


def test_pushforward_is_functorial():
    rng = random.Random(6)
    for trial in range(6):
        A = _supertrivial()
        g, B = random_morphism_by_conjugation(rng, A)
        f, C = random_morphism_by_conjugation(rng, B)
        for S in solution_set(A, 3, seed=trial):
            once = pushforward(diamond(f, g), S)
            twice = pushforward(f, pushforward(g, S))
            assert once.element == twice.element
            assert is_qme_solution(once)
            assert once.element == pushforward_via_diamond(diamond(f, g), S).element


def test_pushforward_requires_morphism_and_solution():
    A = _supertrivial()
    f, _ = random_morphism_by_conjugation(random.Random(7), A)
    with pytest.raises(NotASolution):
        pushforward(f, _lam(A, 1))
    B = _supertrivial()
    bad = f.__class__(A, B, f.images, 0)
    if not is_mv_morphism(bad):
        with pytest.raises(NotAMorphism):
            pushforward(bad, A.zero())


def test_transfer_examples():
    ring = RingMode.hbar_aux(3, 2)
    A = example_bv_algebra(ring)
    rng = random.Random(8)
    f, _ = random_ibl_morphism(rng, A)
    assert transfer_check(f, A.zero())
    lhs, rhs = transfer_sides(f, A.zero())
    assert lhs.is_zero() and rhs.is_zero()
    S = Element(A, {A.monomial("x"): Scalar.lam(ring)})
    assert transfer_check(f, S)
    with pytest.raises(NotPrimitive):
        transfer_check(f, Element(A, {A.monomial("x", "y"): Scalar.lam(ring)}))
