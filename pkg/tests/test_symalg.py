from __future__ import annotations

import random
from math import factorial

import pytest

from mvalgebra import GradedBasis, RingMode, SymmetricAlgebra, TruncationOverflow
from mvalgebra.graded import Element, LinMap, TensorSpace, map_compose, tensor_elements
from mvalgebra.symalg import (
    coproduct,
    derivation,
    iterated_diagonal,
    iterated_product,
    normalize,
    partial_derivative,
    pi1,
    reduced_diagonal_power,
    sym_product,
)

R = RingMode.hbar(2)


def _alg(gens, D=4, ring=R) -> SymmetricAlgebra:
    return SymmetricAlgebra(GradedBasis.of(gens), D, ring)


def _random_element(rng: random.Random, A: SymmetricAlgebra, max_len: int) -> Element:
    return Element(A, {m: rng.randint(-2, 2) for m in A.basis if len(m) <= max_len and rng.random() < 0.5})


def test_normalize_examples():
    odd = [1, 1]
    assert normalize((1, 0), odd) == (-1, (0, 1))
    assert normalize((0, 0), odd) == (0, None)
    assert normalize((0, 0), [0]) == (1, (0, 0))


def test_product_examples():
    A = _alg([("u1", 1), ("u2", 1), ("u3", 0)], D=2)
    u1, u2, u3 = A.gen("u1"), A.gen("u2"), A.gen("u3")
    assert sym_product(A.one(), u1) == u1
    assert sym_product(u1, u2) == -sym_product(u2, u1)
    assert sym_product(u1, u1).is_zero()
    with pytest.raises(TruncationOverflow):
        sym_product(sym_product(u1, u3), u2)


def test_product_is_associative_and_graded_commutative():
    rng = random.Random(3)
    A = _alg([("a", 0), ("b", 1), ("c", -1), ("d", 2)], D=6)
    for _ in range(30):
        x, y, z = (_random_element(rng, A, 2) for _ in range(3))
        assert sym_product(sym_product(x, y), z) == sym_product(x, sym_product(y, z))
        for px in x.homogeneous_parts().values():
            for py in y.homogeneous_parts().values():
                sign = -1 if (next(iter(px.degrees())) * next(iter(py.degrees()))) & 1 else 1
                assert sym_product(px, py) == sym_product(py, px).scale(sign)


def test_diagonal_examples():
    A = _alg([("u1", 0), ("u2", 0)])
    T = TensorSpace(A, A)
    u = A.generator("u1")
    assert iterated_diagonal(A.gen("u1"), 2) == Element(T, {(u, ()): 1, ((), u): 1})
    uv = A.generator("u1") + A.generator("u2")
    v = A.generator("u2")
    expected = Element(T, {(uv, ()): 1, (u, v): 1, (v, u): 1, ((), uv): 1})
    assert iterated_diagonal(Element(A, {uv: 1}), 2) == expected
    x = Element(A, {uv: 3, u: 1})
    assert iterated_diagonal(x, 1) == Element(TensorSpace(A), {(uv,): 3, (u,): 1})
    assert reduced_diagonal_power(Element(A, {uv: 1}), 2).is_zero()


def test_diagonal_methods_agree():
    A = _alg([("a", 0), ("b", 1), ("c", 2)], D=4)
    for m in A.basis:
        x = Element(A, {m: 1})
        for k in range(1, 4):
            assert iterated_diagonal(x, k) == iterated_diagonal(x, k, method="permutation")


def test_pi1_examples():
    A = _alg([("u1", 0), ("u2", 1)])
    P = pi1(A)
    assert P(A.gen("u1")) == A.gen("u1")
    assert P(A.one()).is_zero()
    assert P(sym_product(A.gen("u1"), A.gen("u2"))).is_zero()


def test_n_factorial_identity():
    A = _alg([("a", 0), ("b", 1), ("c", 0)], D=4)
    for m in A.basis:
        x = Element(A, {m: 1})
        for k in range(1, 5):
            T = iterated_diagonal(x, k)
            P = {key: c for key, c in T.terms.items() if all(len(w) == 1 for w in key)}
            got = iterated_product(Element(T.space, P), A)
            n = len(m)
            assert got == Element(A, {m: factorial(n)} if k == n else {})


def test_bialgebra_law():
    rng = random.Random(8)
    A = _alg([("a", 0), ("b", 1), ("c", -1)], D=4)
    T = TensorSpace(A, A)

    def tensor_mul(s: Element, t: Element) -> Element:
        out = Element(T)
        for (a1, a2), c in s.terms.items():
            for (b1, b2), d in t.terms.items():
                sign = -1 if (A.degree(a2) * A.degree(b1)) & 1 else 1
                left = sym_product(Element(A, {a1: 1}), Element(A, {b1: 1}))
                right = sym_product(Element(A, {a2: 1}), Element(A, {b2: 1}))
                out = out + tensor_elements(left, right).scale(c * d * sign)
        return out

    for _ in range(20):
        x, y = _random_element(rng, A, 2), _random_element(rng, A, 2)
        assert coproduct(sym_product(x, y)) == tensor_mul(coproduct(x), coproduct(y))


def test_counit_and_cocommutativity():
    A = _alg([("a", 0), ("b", 1), ("c", 1)], D=3)
    for m in A.basis:
        x = Element(A, {m: 1})
        d = coproduct(x)
        left = Element(A, {})
        right = Element(A, {})
        flipped = {}
        for (a, b), c in d.terms.items():
            if not a:
                left = left + Element(A, {b: c})
            if not b:
                right = right + Element(A, {a: c})
            sign = -1 if (A.degree(a) * A.degree(b)) & 1 else 1
            flipped[(b, a)] = c.scale(sign)
        assert left == x and right == x
        assert Element(d.space, flipped) == d


def test_derivation_leibniz():
    A = _alg([("x", 0), ("xi", -1), ("y", 0), ("eta", 1)], D=4)
    d = partial_derivative(A, "xi")
    assert d.degree == 1
    rng = random.Random(4)
    for _ in range(20):
        a, b = _random_element(rng, A, 2), _random_element(rng, A, 2)
        for pa in a.homogeneous_parts().values():
            deg = next(iter(pa.degrees()))
            sign = -1 if deg & 1 else 1
            lhs = d(sym_product(pa, b))
            rhs = sym_product(d(pa), b) + sym_product(pa, d(b)).scale(sign)
            assert lhs == rhs


def test_derivation_squares():
    A = _alg([("x", 0), ("y", 1)], D=3)
    Q = derivation(A, {"x": A.gen("y")}, 1)
    assert map_compose(Q, Q) == LinMap.zero(A, A)
    assert Q(sym_product(A.gen("x"), A.gen("x"))) == sym_product(A.gen("x"), A.gen("y")).scale(2)
