"""Random objects for property tests and demos.

Every generator takes a :class:`random.Random` so runs are reproducible.
Maps into symmetric algebras are built so that word length never grows
beyond what the target truncation can hold; see :func:`random_lin0_map`.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .graded import Element, GradedBasis, LinMap, acc
from .mvcat import (
    ConvMap,
    ExplicitMVAlgebra,
    MVAlgebra,
    SymmetricMVAlgebra,
    _cm,
    divided_power_coalgebra,
    exp_map,
    exterior_algebra,
    make_supertrivial,
    truncated_polynomial_algebra,
)
from .scalars import Mode, RingMode, Scalar
from .symalg import SymmetricAlgebra

_NUMS = (-3, -2, -1, 1, 2, 3, Fraction(1, 2), Fraction(-1, 3), Fraction(2, 3))


def random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.choice(_NUMS))


def _exponent_pairs(ring: RingMode, in_ideal: bool):
    pairs = []
    for i in range(-ring.P, ring.H):
        for j in range(ring.L):
            if in_ideal and not ring.term_in_ideal(i, j):
                continue
            pairs.append((i, j))
    return pairs


def random_scalar(rng: random.Random, ring: RingMode, in_ideal: bool = False, density: float = 0.5,
                  max_hbar: int | None = None, min_hbar: int | None = None) -> Scalar:
    terms = {}
    for i, j in _exponent_pairs(ring, in_ideal):
        if max_hbar is not None and i > max_hbar:
            continue
        if min_hbar is not None and i < min_hbar:
            continue
        if rng.random() < density:
            terms[(i, j)] = random_rational(rng)
    return Scalar(terms, ring)


def random_graded_basis(rng: random.Random, dim: int, degrees: Sequence[int] = (-2, -1, 0, 1, 2),
                        prefix: str = "u") -> GradedBasis:
    return GradedBasis(tuple(f"{prefix}{i}" for i in range(dim)), tuple(rng.choice(degrees) for _ in range(dim)))


def random_symmetric_algebra(rng: random.Random, ring: RingMode, dim: int, D: int,
                             degrees: Sequence[int] = (-2, -1, 0, 1, 2), prefix: str = "u") -> SymmetricMVAlgebra:
    return SymmetricMVAlgebra(SymmetricAlgebra(random_graded_basis(rng, dim, degrees, prefix), D, ring))


def _length(A: MVAlgebra, key) -> int:
    return len(key) if isinstance(A, SymmetricMVAlgebra) else 0


def random_lin0_map(rng: random.Random, source: MVAlgebra, target: MVAlgebra, density: float = 0.35,
                    growth: str = "none", degree: int = 0, unit_density: float | None = None,
                    hbar_divisible: bool = False) -> ConvMap:
    """Random degree-``degree`` map with ``f(1)`` in the maximal ideal.

    For symmetric endpoints output word length is bounded so that
    compositions and exponentials stay inside the truncation:

    * ``growth="none"``: ``|y| <= |x|``;
    * ``growth="hbar"``: a term ``hbar^a`` may have ``|y| <= |x| + a``.
      Targets then need ``D >= D_src + H - 1``.

    ``hbar_divisible`` makes ``f^m_n`` divisible by ``hbar^{n-1}`` and
    removes ``hbar^0`` from ``f(1)``.
    """
    return _random_images(rng, source, target, degree, density,
                          density if unit_density is None else unit_density,
                          lin0=True, growth=growth, hbar_divisible=hbar_divisible)


def random_map(rng: random.Random, source: MVAlgebra, target: MVAlgebra, degree: int = 0,
               density: float = 0.35, lin0: bool = False) -> ConvMap:
    """Random homogeneous map with word-length non-increasing images."""
    return _random_images(rng, source, target, degree, density, density, lin0=lin0)


def _random_images(rng, source, target, degree, density, unit_density, lin0, growth="none",
                   hbar_divisible=False) -> ConvMap:
    ring = source.ring
    images = {}
    for x in source.basis:
        is_unit = x == source.unit
        n = _length(source, x)
        img: dict = {}
        for y in target.basis:
            if target.degree(y) != source.degree(x) + degree:
                continue
            if rng.random() >= (unit_density if is_unit else density):
                continue
            min_h = None
            if hbar_divisible:
                min_h = 1 if is_unit else max(n - 1, 0)
            c = random_scalar(rng, ring, in_ideal=lin0 and is_unit, density=0.5, min_hbar=min_h)
            m = _length(target, y)
            keep = {}
            for (i, j), q in c.terms.items():
                excess = max(i, 0) if growth == "hbar" else 0
                if m <= n + excess:
                    keep[(i, j)] = q
            c = Scalar(keep, ring)
            if c.terms:
                img[y] = c
        if img:
            images[x] = img
    return _cm(source, target, images, degree)


# ---------------------------------------------------------------- explicit algebras

def random_supertrivial(rng: random.Random, ring: RingMode, dim: int, name: str | None = None) -> ExplicitMVAlgebra:
    """Supertrivial algebra on ``1`` plus ``dim - 1`` atoms of degree 0 or 1.

    ``Delta`` maps degree-0 atoms to degree-1 atoms; since nothing sits in
    degree 2, ``Delta^2 = 0`` holds automatically.
    """
    names = ["1"] + [f"v{i}" for i in range(1, dim)]
    degs = [0] + [rng.choice((0, 0, 1)) for _ in range(1, dim)]
    if dim > 1 and 0 not in degs[1:]:
        degs[1] = 0
    gb = GradedBasis(tuple(names), tuple(degs))
    Delta = {}
    for i in range(1, dim):
        if degs[i] != 0:
            continue
        img = {}
        for j in range(1, dim):
            if degs[j] == 1 and rng.random() < 0.6:
                c = random_scalar(rng, ring, density=0.4)
                if c.terms:
                    img[j] = c
        if img:
            Delta[i] = img
    return make_supertrivial(gb, {0: 1}, 0, Delta, ring, name=name)


def random_explicit_algebra(rng: random.Random, ring: RingMode, max_dim: int = 5) -> ExplicitMVAlgebra:
    kind = rng.choice(("supertrivial", "polynomial", "exterior", "divided"))
    if kind == "supertrivial":
        return random_supertrivial(rng, ring, rng.randint(2, max_dim))
    if kind == "polynomial":
        return truncated_polynomial_algebra(rng.randint(2, min(4, max_dim)), ring)
    if kind == "exterior":
        return exterior_algebra(ring, degree=rng.choice((-1, 1)))
    return divided_power_coalgebra(rng.randint(2, min(4, max_dim)), ring)


def random_mv_algebra(rng: random.Random, ring: RingMode, max_dim: int = 5) -> MVAlgebra:
    """Explicit algebra or a small ``S^{<=D}(U)`` with ``dim <= max_dim``."""
    if rng.random() < 0.3:
        gb = random_graded_basis(rng, 1, (0, 1, -1), prefix=rng.choice("abc"))
        # an odd generator squares to zero, so S(U) is 2-dimensional
        D = min(max_dim - 1, 4) if gb.degrees[0] % 2 == 0 else 1
        return SymmetricMVAlgebra(SymmetricAlgebra(gb, D, ring))
    return random_explicit_algebra(rng, ring, max_dim)


# ---------------------------------------------------------------- IBL-shaped morphisms

def random_ibl_family_map(rng: random.Random, source: SymmetricMVAlgebra, target: SymmetricMVAlgebra,
                          density: float = 0.35) -> ConvMap:
    return random_lin0_map(rng, source, target, density=density, growth="hbar", hbar_divisible=True)


def neumann_inverse(Phi: LinMap) -> ConvMap:
    """Inverse of ``Phi = id + N`` with ``N`` nilpotent (coefficients in the maximal ideal)."""
    A = Phi.source
    one = Scalar.one(A.ring)
    Nim = {}
    for x in A.basis:
        img = dict(Phi.image(x))
        acc(img, x, -one)
        if img:
            Nim[x] = img
    for img in Nim.values():
        for c in img.values():
            if not c.in_maximal_ideal():
                raise ValueError("Phi - id is not nilpotent")
    total = {x: {x: one} for x in A.basis}
    term = {x: {x: one} for x in A.basis}
    for _ in range(A.ring.nilpotency_index() + 1):
        nxt = {}
        for x, img in term.items():
            out: dict = {}
            for y, c in img.items():
                for z, d in Nim.get(y, {}).items():
                    acc(out, z, -(c * d))
            if out:
                nxt[x] = out
        term = nxt
        if not term:
            break
        for x, img in term.items():
            d = total.setdefault(x, {})
            for y, c in img.items():
                acc(d, y, c)
    return _cm(A, A, {k: v for k, v in total.items() if v}, None)


def conjugated_algebra(source: MVAlgebra, f: LinMap, name: str | None = None) -> MVAlgebra:
    """Target with ``Delta'' = exp(f) Delta' exp(f)^{-1}`` so that ``f`` is a morphism.

    ``f`` must map ``source`` to a copy of itself (same basis) with
    ``exp(f) - id`` nilpotent.  The copy is returned.
    """
    Phi = exp_map(f)
    Phi_inv = neumann_inverse(Phi)
    # images of Phi o Delta' o Phi^{-1}, read on the target copy
    from .graded import map_compose
    conj = map_compose(map_compose(Phi, source.Delta), Phi_inv)
    T = f.target
    images = {x: dict(img) for x, img in conj.images.items()}
    if isinstance(T, SymmetricMVAlgebra):
        out = SymmetricMVAlgebra(T.sym, images, name=name)
    elif isinstance(T, ExplicitMVAlgebra):
        out = ExplicitMVAlgebra(T.gb, T.ring, unit=T.unit, mu=T._mu_given, delta=T._delta_given,
                                eps=T._eps, Delta=images, name=name)
    else:
        raise TypeError("conjugation supports explicit and symmetric algebras")
    return out


def random_ibl_morphism(rng: random.Random, source: SymmetricMVAlgebra, density: float = 0.3):
    """An IBL-shaped MV-morphism ``f = pi_1 + h`` out of ``source``.

    Every term of ``h`` carries ``hbar``, ``h`` does not raise word length
    and ``h^m_n`` is divisible by ``hbar^{n-1}``.  Returns ``(f, target)``
    where the target's ``Delta`` is conjugated by ``exp(f)``.
    """
    ring = source.ring
    T = SymmetricMVAlgebra(source.sym)
    h = {}
    for x in source.basis:
        if not x:
            continue
        n = len(x)
        img = {}
        for y in T.basis:
            if not y or len(y) > n or T.degree(y) != source.degree(x):
                continue
            if rng.random() < density:
                c = random_scalar(rng, ring, density=0.5, min_hbar=max(n - 1, 1))
                if c.terms:
                    img[y] = c
        if len(x) == 1:
            acc(img, x, Scalar.one(ring))
        if img:
            h[x] = img
    f0 = _cm(source, T, h, 0)
    target = conjugated_algebra(source, f0)
    f = _cm(source, target, f0.images, 0)
    return f, target


def random_morphism_by_conjugation(rng: random.Random, source: MVAlgebra, density: float = 0.4):
    """``f = 1_V + (terms in the maximal ideal)`` with ``f(1) = 0`` and a conjugated target."""
    from .mvcat import mv_unit
    ring = source.ring
    u = mv_unit(source)
    images = {x: dict(img) for x, img in u.images.items()}
    for x in source.basis:
        if x == source.unit:
            continue
        for y in source.basis:
            if source.degree(y) != source.degree(x):
                continue
            if isinstance(source, SymmetricMVAlgebra) and len(y) > len(x):
                continue
            if rng.random() < density:
                c = random_scalar(rng, ring, in_ideal=True, density=0.4)
                if c.terms:
                    acc(images.setdefault(x, {}), y, c)
    images = {k: v for k, v in images.items() if v}
    if isinstance(source, SymmetricMVAlgebra):
        T = SymmetricMVAlgebra(source.sym)
    else:
        T = ExplicitMVAlgebra(source.gb, source.ring, unit=source.unit, mu=source._mu_given,
                              delta=source._delta_given, eps=source._eps)
    f0 = _cm(source, T, images, 0)
    target = conjugated_algebra(source, f0)
    return _cm(source, target, images, 0), target


def random_element(rng: random.Random, A: MVAlgebra, degree: int | None = None, in_ideal: bool = False,
                   density: float = 0.4, max_length: int | None = None) -> Element:
    terms = {}
    for x in A.basis:
        if degree is not None and A.degree(x) != degree:
            continue
        if max_length is not None and isinstance(A, SymmetricMVAlgebra) and len(x) > max_length:
            continue
        if rng.random() < density:
            c = random_scalar(rng, A.ring, in_ideal=in_ideal, density=0.5)
            if c.terms:
                terms[x] = c
    return Element(A, terms)


def example_bv_algebra(ring: RingMode, D: int = 4, name: str | None = None) -> SymmetricMVAlgebra:
    """``S(x, xi, y, eta)`` with degrees ``0, -1, 0, 1`` and ``Delta = eta d/dy + hbar d/dx d/dxi``.

    The second summand is a genuine second-order operator, so ``Delta`` is a
    BV-infinity operator that is not a derivation.
    """
    from .graded import map_add, map_compose, map_scale
    from .symalg import derivation, partial_derivative

    A0 = SymmetricMVAlgebra.free([("x", 0), ("xi", -1), ("y", 0), ("eta", 1)], D, ring)
    S = A0.sym
    first = derivation(S, {"y": A0.gen("eta")}, 1)
    second = map_compose(partial_derivative(S, "x"), partial_derivative(S, "xi"))
    Delta = map_add(first, map_scale(second, Scalar.hbar(ring)))
    return SymmetricMVAlgebra(S, Delta.images, name=name or "eta d/dy + hbar d/dx d/dxi")
