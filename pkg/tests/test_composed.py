from __future__ import annotations

import random

import pytest

from mvalgebra import (
    BlockSumMismatch,
    NotAnUnshuffle,
    NotSymmetricFlavor,
    RingMode,
    Scalar,
    SymmetricMVAlgebra,
    assemble,
    compose_definitional,
    compose_explicit,
    components,
    connectivity,
    diamond,
    hbar_split,
    is_bv_infinity,
    is_ibl_family,
    is_munster_sachs_family,
    operator_order,
    phi_n,
    pi1,
    psi,
    zero_map,
)
from mvalgebra.composed import (
    coderivation_from_brackets,
    family_from_images,
    is_coderivation,
    l_infty_brackets,
    linf_relation,
    psi_on,
)
from mvalgebra.graded import Element, koszul_sign, map_compose
from mvalgebra.mvcat import _cm
from mvalgebra.symalg import derivation, partial_derivative
from mvalgebra.testing import (
    example_bv_algebra,
    random_lin0_map,
    random_supertrivial,
    random_symmetric_algebra,
)

R = RingMode.hbar(3)


def _free(gens, D=3, ring=R, Delta=None) -> SymmetricMVAlgebra:
    return SymmetricMVAlgebra.free(gens, D, ring, Delta)


# ---------------------------------------------------------------- components

def test_components_examples():
    A = _free([("u", 0), ("v", 1)])
    P = components(pi1(A))
    assert P.cells() == [(1, 1)]
    assert P.cell(1, 1) == {(0,): {(0,): Scalar.one(R)}, (1,): {(1,): Scalar.one(R)}}
    assert components(zero_map(A, A)).table == {}


def test_assemble_round_trip():
    rng = random.Random(1)
    A, B = _free([("u", 0), ("v", 1)]), _free([("a", 0), ("b", 1)])
    for _ in range(20):
        f = random_lin0_map(rng, A, B, density=0.5)
        assert assemble(components(f)) == f


def test_components_need_symmetric_algebras():
    A = random_supertrivial(random.Random(0), R, 3)
    with pytest.raises(NotSymmetricFlavor):
        components(zero_map(A, A))


# ---------------------------------------------------------------- Psi and connectivity

def test_psi_examples():
    A = _free([("u1", 0), ("u2", 0)], D=3)
    sym = A.sym
    I = psi(sym, (2,), (2,))
    assert all(img == {(x[0],): Scalar.one(R)} for x, img in I.images.items())
    u1, u2 = (0,), (1,)
    assert psi_on(sym, [u1, u2], (2,)) == {((0, 1),): 1}
    assert psi_on(sym, [u1, u2], (2,), c=1) == {((0, 1),): 1}
    full = psi_on(sym, [u1, u2], (1, 1))
    assert full == {(u1, u2): 1, (u2, u1): 1}
    assert psi_on(sym, [u1, u2], (1, 1), c=1) == {}
    assert psi_on(sym, [u1, u2], (1, 1), c=2) == full


def test_psi_partition_by_connectivity_as_maps():
    A = _free([("a", 0), ("b", 1)], D=3)
    for j in [(1, 2), (2, 1), (1, 1, 1), (3,)]:
        for s in [(3,), (1, 2), (2, 1), (1, 1, 1)]:
            total = psi(A.sym, j, s)
            parts = [psi(A.sym, j, s, c) for c in range(1, len(j) + len(s))]
            acc = parts[0]
            for p in parts[1:]:
                acc = acc + p
            assert acc == total, (j, s)


def test_psi_invariant_under_permuting_letters():
    A = _free([("a", 0), ("b", 1), ("c", 1), ("d", 2)], D=4)
    rng = random.Random(2)
    degs = A.sym.gen_degrees
    for _ in range(40):
        words = [tuple(sorted(rng.sample(range(4), rng.randint(1, 2)))) for _ in range(2)]
        n = sum(len(w) for w in words)
        s = rng.choice([c for c in [(n,), (1, n - 1), (n - 1, 1)] if all(c)])
        base = psi_on(A.sym, words, s)
        i = rng.randrange(2)
        w = words[i]
        perm = list(range(len(w)))
        rng.shuffle(perm)
        swapped = list(words)
        swapped[i] = tuple(w[p] for p in perm)
        sign = koszul_sign(perm, [degs[g] for g in w])
        assert psi_on(A.sym, swapped, s) == {k: sign * q for k, q in base.items()}


def test_connectivity_examples():
    G = connectivity((0, 1, 2), (3,), (3,))
    assert G.components == 1
    G = connectivity((0, 1), (1, 1), (1, 1))
    assert G.components == 2 and G.betti == 0
    for kappa in [(0, 1), (1, 0)]:
        G = connectivity(kappa, (2,), (1, 1))
        assert G.components == 1 and G.betti == 0
    G = connectivity((0, 2, 1, 3), (2, 2), (2, 2))
    assert G.components == 1 and G.betti == 1 and G.E - G.V + 1 == G.betti


def test_connectivity_input_errors():
    with pytest.raises(BlockSumMismatch):
        connectivity((0, 1), (1,), (2,))
    with pytest.raises(NotAnUnshuffle):
        connectivity((1, 0), (2,), (2,))


# ---------------------------------------------------------------- composition

def test_compose_on_one_one_components():
    A, B, C = _free([("a", 0)]), _free([("b", 0), ("b2", 0)]), _free([("c", 0)])
    a, b, c = (0,), (0,), (0,)
    g = family_from_images(A, B, {a: {b: Scalar.const(3, R)}})
    f = family_from_images(B, C, {b: {c: Scalar.const(2, R)}})
    h = compose_explicit(f, g)
    assert h.cells() == [(1, 1)]
    assert h.cell(1, 1) == {a: {c: Scalar.const(6, R)}}


def test_compose_with_unit():
    rng = random.Random(3)
    A, B = _free([("a", 0), ("b", 1)], D=2), _free([("c", 0), ("d", -1)], D=2)
    for _ in range(10):
        f = components(random_lin0_map(rng, A, B, density=0.5))
        assert compose_explicit(f, components(pi1(A))) == f
        assert compose_explicit(components(pi1(B)), f) == f


def test_compose_matches_diamond():
    rng = random.Random(4)
    for _ in range(20):
        A = random_symmetric_algebra(rng, R, 2, 2, (0, 1), prefix="a")
        B = random_symmetric_algebra(rng, R, 2, 4, (0, 1), prefix="b")
        C = random_symmetric_algebra(rng, R, 2, 4, (0, 1), prefix="c")
        g = random_lin0_map(rng, A, B, growth="hbar", density=0.5)
        f = random_lin0_map(rng, B, C, density=0.5)
        F, G = components(f), components(g)
        expected = components(diamond(f, g))
        assert compose_explicit(F, G) == expected
        assert compose_explicit(F, G, reduced=False) == expected
        assert compose_definitional(F, G) == expected


# ---------------------------------------------------------------- divisibility conditions

def test_ibl_examples():
    A = _free([("a", 0), ("b", 0)])
    a, b, ab = (0,), (1,), (0, 1)
    assert is_ibl_family(family_from_images(A, A, {a: {a: Scalar.one(R)}}))
    assert not is_ibl_family(family_from_images(A, A, {ab: {a: Scalar.one(R)}}))
    assert is_ibl_family(family_from_images(A, A, {ab: {a: Scalar.hbar(R)}}))
    assert not is_ibl_family(family_from_images(A, A, {(): {a: Scalar.one(R)}}))
    with pytest.raises(ValueError):
        K = _free([("a", 0)], ring=RingMode.k())
        is_ibl_family(components(zero_map(K, K)))


def test_munster_sachs_examples():
    A = _free([("a", 0), ("b", 0)])
    a, aa = (0,), (0, 0)
    assert is_munster_sachs_family(family_from_images(A, A, {a: {a: Scalar.one(R)}}))
    assert not is_munster_sachs_family(family_from_images(A, A, {a: {aa: Scalar.one(R)}}))
    assert is_munster_sachs_family(family_from_images(A, A, {a: {aa: Scalar.hbar(R)}}))


def test_munster_sachs_closed_under_composition():
    rng = random.Random(5)
    for _ in range(25):
        A = random_symmetric_algebra(rng, R, 2, 1, (0, 1), prefix="a")
        B = random_symmetric_algebra(rng, R, 2, 3, (0, 1), prefix="b")
        C = random_symmetric_algebra(rng, R, 2, 3, (0, 1), prefix="c")
        fams = []
        for src, tgt, growth in ((A, B, "hbar"), (B, C, "none")):
            images = {}
            for x, img in random_lin0_map(rng, src, tgt, growth=growth, density=0.5).images.items():
                keep = {}
                for y, c in img.items():
                    c = Scalar({(i, j): q for (i, j), q in c.terms.items() if len(y) <= i + 1}, R)
                    if c.terms:
                        keep[y] = c
                if keep:
                    images[x] = keep
            fams.append(family_from_images(src, tgt, images))
        g, f = fams
        assert is_munster_sachs_family(f) and is_munster_sachs_family(g)
        assert is_munster_sachs_family(compose_explicit(f, g))


# ---------------------------------------------------------------- operators

def test_phi_of_a_derivation_vanishes():
    A = _free([("x", 0), ("y", 1)], D=3)
    Q = derivation(A.sym, {"x": A.gen("y")}, 1)
    x, y = A.gen("x"), A.gen("y")
    assert phi_n(A, [x, y], Q).is_zero()
    assert operator_order(A, Q, 1)
    assert not operator_order(A, Q, 0)


def test_phi_two_formula():
    A = example_bv_algebra(RingMode.hbar(2))
    rng = random.Random(6)
    D = A.Delta
    for _ in range(20):
        a = Element(A, {m: rng.randint(-2, 2) for m in A.basis if len(m) <= 1 and rng.random() < 0.5})
        b = Element(A, {m: rng.randint(-2, 2) for m in A.basis if len(m) <= 1 and rng.random() < 0.5})
        expected = A.zero()
        for da, pa in a.homogeneous_parts().items():
            sign = -1 if da & 1 else 1
            expected = expected + D(A.mul(pa, b)) - A.mul(D(pa), b) - A.mul(pa, D(b)).scale(sign)
        assert phi_n(A, [a, b]) == expected


def test_phi_zero_convention():
    A = _free([("x", 0), ("y", 1)], D=2, Delta={(): {(1,): Scalar.one(R)}})
    assert phi_n(A, []).is_zero()
    assert phi_n(A, [], phi0="apply") == A.gen("y")


def test_left_multiplication_has_order_zero():
    A = _free([("x", 0), ("y", 1), ("z", 0)], D=3)
    L = _cm(A, A, {m: A.mul(A.gen("x"), A.basis_element(m)).terms for m in A.basis if len(m) < 3}, 0)
    assert operator_order(A, L, 0)


def test_bv_infinity_reports():
    ring = RingMode.hbar(2)
    A = _free([("x", 0), ("y", 1)], D=3, ring=ring)
    Q = derivation(A.sym, {"x": A.gen("y")}, 1)
    assert is_bv_infinity(SymmetricMVAlgebra(A.sym, Q.images)).passed
    bv = example_bv_algebra(ring)
    assert is_bv_infinity(bv).passed
    split = hbar_split(bv)
    assert sorted(split) == [1, 2]
    # move the second-order part to hbar^0: it now fails at k = 1
    second = map_compose(partial_derivative(bv.sym, "x"), partial_derivative(bv.sym, "xi"))
    bad = SymmetricMVAlgebra(bv.sym, second.images)
    rep = is_bv_infinity(bad)
    assert rep.get("Delta_square_zero").passed
    assert not rep.get("order_Delta_1<=1").passed


def test_coderivation_from_brackets():
    ring = RingMode.k()
    A = _free([("x", -1), ("y", 0), ("z", 1)], D=3, ring=ring)
    one = Scalar.one(ring)
    x, y, z = (0,), (1,), (2,)
    l1 = {x: {y: one}, y: {z: one}}
    l1_sq_zero = {x: {y: one}}
    for brackets in ({1: l1}, {1: l1_sq_zero, 2: {(0, 1): {y: one}}}):
        Q = coderivation_from_brackets(A, brackets)
        assert is_coderivation(A, Q)
        assert l_infty_brackets(A, Q).brackets == {n: {k: v for k, v in b.items()} for n, b in brackets.items()}
        sq = map_compose(Q, Q)
        for n in (1, 2, 3):
            rel = linf_relation(A, brackets, n)
            got = {k: {y2: c for y2, c in img.items() if len(y2) == 1} for k, img in sq.images.items() if len(k) == n}
            assert {k: v for k, v in got.items() if v} == rel
    assert not l_infty_brackets(A, coderivation_from_brackets(A, {1: l1})).square_zero
    data = l_infty_brackets(A, coderivation_from_brackets(A, {1: l1_sq_zero}))
    assert data.square_zero
