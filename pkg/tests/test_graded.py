from __future__ import annotations

import random
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvalgebra import BasisMismatch, FreeSpace, GradedBasis, LinMap, RingMode, Scalar, TensorSpace
from mvalgebra.graded import (
    Element,
    compositions,
    is_unshuffle,
    koszul_sign,
    map_compose,
    map_tensor,
    multinomial,
    set_partitions,
    tensor_elements,
    unshuffles,
)

R = RingMode.hbar(2)


def _random_map(rng: random.Random, src: FreeSpace, tgt: FreeSpace, degree: int) -> LinMap:
    images = {}
    for x in src.basis:
        img = {y: Scalar.const(rng.randint(-3, 3), R) for y in tgt.basis
               if tgt.degree(y) == src.degree(x) + degree and rng.random() < 0.7}
        images[x] = img
    return LinMap(src, tgt, images, degree)


def _space(rng: random.Random, prefix: str) -> FreeSpace:
    n = rng.randint(1, 4)
    return FreeSpace(GradedBasis(tuple(f"{prefix}{i}" for i in range(n)),
                                 tuple(rng.randint(-1, 2) for _ in range(n))), R)


def test_koszul_sign_examples():
    assert koszul_sign((0, 1, 2), (1, 1, 3)) == 1
    assert koszul_sign((1, 0), (1, 1)) == -1
    assert koszul_sign((1, 0), (0, 1)) == 1
    with pytest.raises(ValueError):
        koszul_sign((0, 0), (1, 1))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.permutations(range(n)), st.permutations(range(n)), st.lists(st.integers(-2, 2), min_size=n, max_size=n))))
def test_koszul_sign_is_a_cocycle(data):
    sigma, tau, degrees = data
    # reorder by tau first, then by sigma on the reordered list
    after_tau = [degrees[t] for t in tau]
    composite = [tau[s] for s in sigma]
    assert koszul_sign(composite, degrees) == koszul_sign(tau, degrees) * koszul_sign(sigma, after_tau)


def test_unshuffle_examples():
    assert unshuffles((3,)) == [(0, 1, 2)]
    assert len(unshuffles((1, 1))) == 2
    assert unshuffles((2, 1)) == [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
    assert unshuffles((2, 1), method="filter") == [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
    assert is_unshuffle((0, 2, 1), (2, 1)) and not is_unshuffle((2, 0, 1), (2, 1))


def test_unshuffle_counts_are_multinomial():
    for n in range(8):
        for k in range(1, 4):
            for sizes in compositions(n, k):
                gen = unshuffles(sizes)
                assert len(gen) == multinomial(sizes) == len(set(gen))
                assert all(is_unshuffle(p, sizes) for p in gen)
                if n <= 5:
                    assert gen == unshuffles(sizes, method="filter")


def test_set_partitions_are_bell_numbers():
    assert [sum(1 for _ in set_partitions(range(n))) for n in range(7)] == [1, 1, 2, 5, 15, 52, 203]


def test_identity_and_degree_of_composite():
    rng = random.Random(5)
    for _ in range(40):
        A, B, C = _space(rng, "a"), _space(rng, "b"), _space(rng, "c")
        d1, d2 = rng.randint(-1, 1), rng.randint(-1, 1)
        g, f = _random_map(rng, A, B, d1), _random_map(rng, B, C, d2)
        assert map_compose(f, LinMap.identity(B)) == f
        fg = map_compose(f, g)
        assert fg.degree == d1 + d2
        assert fg.is_homogeneous(d1 + d2)


def test_tensor_koszul_rule():
    V = FreeSpace(GradedBasis.of([("x", 1), ("y", 0)]), R)
    W = FreeSpace(GradedBasis.of([("p", 0), ("q", 1)]), R)
    f = LinMap.identity(V)
    g = LinMap(W, W, {0: {1: Scalar.one(R)}}, 1)
    x, p = 0, 0
    out = map_tensor(f, g)(tensor_elements(Element(V, {x: 1}), Element(W, {p: 1})))
    assert out == Element(TensorSpace(V, W), {(0, 1): -1})


def test_tensor_interchange_law():
    rng = random.Random(11)
    for _ in range(40):
        A, B, C = _space(rng, "a"), _space(rng, "b"), _space(rng, "c")
        D, E, F = _space(rng, "d"), _space(rng, "e"), _space(rng, "f")
        fp, gp = _random_map(rng, A, B, rng.randint(-1, 1)), _random_map(rng, D, E, rng.randint(-1, 1))
        f, g = _random_map(rng, B, C, rng.randint(-1, 1)), _random_map(rng, E, F, rng.randint(-1, 1))
        lhs = map_compose(map_tensor(f, g), map_tensor(fp, gp))
        rhs = map_tensor(map_compose(f, fp), map_compose(g, gp))
        sign = -1 if (g.degree * fp.degree) & 1 else 1
        assert lhs == rhs.scale(sign)


def test_linmap_rejects_inhomogeneous_images():
    V = FreeSpace(GradedBasis.of([("x", 0), ("y", 1)]), R)
    with pytest.raises(ValueError):
        LinMap(V, V, {0: {0: Scalar.one(R)}}, 1)


def test_spaces_must_match():
    V = FreeSpace(GradedBasis.of([("x", 0)]), R)
    W = FreeSpace(GradedBasis.of([("x", 0)]), RingMode.hbar(3))
    with pytest.raises(BasisMismatch):
        Element(V, {0: 1}) + Element(W, {0: 1})


def test_element_json_round_trip():
    V = FreeSpace(GradedBasis.of([("x", 0), ("y", 1)]), R)
    T = TensorSpace(V, V)
    e = Element(T, {(0, 1): Scalar({(1, 0): 3}, R), (1, 0): -2})
    assert Element.from_json(T, e.to_json()) == e


def test_compositions_enumeration():
    assert list(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert list(compositions(0, 0)) == [()]
    assert list(compositions(1, 0)) == []
    for n in range(5):
        for p in permutations(range(n)):
            assert koszul_sign(p, [0] * n) == 1
