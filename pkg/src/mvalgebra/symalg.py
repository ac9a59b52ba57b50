"""The truncated free graded commutative algebra ``S^{<=D}(U)``.

Monomials are sorted tuples of generator indices.  Products that would
exceed word length ``D`` raise :class:`TruncationOverflow` instead of being
dropped, so every computation that finishes is a statement about the
untruncated object.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations
from math import factorial
from typing import Sequence

from .errors import SchemaError, TruncationOverflow
from .graded import (
    Element,
    GradedBasis,
    GradedSpace,
    LinMap,
    TensorSpace,
    acc,
    block_sign,
    compositions,
    koszul_sign,
    unshuffle_blocks,
)
from .scalars import RingMode, Scalar

Monomial = tuple


def normalize(word: Sequence[int], degrees: Sequence[int]) -> tuple[int, Monomial | None]:
    """Sort a word of generators with its Koszul sign.

    Returns ``(0, None)`` when an odd generator repeats, since such a word
    is zero in characteristic zero.
    """
    word = tuple(word)
    n = len(word)
    perm = sorted(range(n), key=lambda i: word[i])
    out = tuple(word[i] for i in perm)
    for a, b in zip(out, out[1:]):
        if a == b and degrees[a] & 1:
            return 0, None
    return koszul_sign(perm, [degrees[w] for w in word]), out


class SymmetricAlgebra(GradedSpace):
    """``S^{<=D}(U)`` over a ring; also the graded space of its monomials."""

    def __init__(self, generators: GradedBasis, D: int, ring: RingMode):
        if D < 1:
            raise ValueError("word length bound D must be positive")
        self.U = generators
        self.D = D
        self.ring = ring
        self.gen_degrees = generators.degrees
        basis = []
        for n in range(D + 1):
            for word in combinations_with_replacement(range(len(generators)), n):
                if all(not (a == b and self.gen_degrees[a] & 1) for a, b in zip(word, word[1:])):
                    basis.append(word)
        self._basis = tuple(basis)
        self._index = {m: i for i, m in enumerate(basis)}
        self._coprod: dict = {}

    # GradedSpace protocol
    @property
    def basis(self) -> tuple:
        return self._basis

    def degree(self, key: Monomial) -> int:
        g = self.gen_degrees
        return sum(g[i] for i in key)

    def key_to_json(self, key: Monomial):
        return [self.U.names[i] for i in key]

    def key_from_json(self, data) -> Monomial:
        if not isinstance(data, list):
            raise SchemaError(f"symmetric monomial must be a list of generator names, got {data!r}")
        word = [self.U.index(str(a)) for a in data]
        sign, mono = normalize(word, self.gen_degrees)
        if mono is None:
            raise SchemaError(f"monomial {data!r} repeats an odd generator")
        if sign != 1:
            raise SchemaError(f"monomial {data!r} is not in sorted order")
        if len(mono) > self.D:
            raise TruncationOverflow(f"monomial {data!r} longer than D={self.D}; raise D")
        return mono

    def __eq__(self, other):
        return (
            isinstance(other, SymmetricAlgebra)
            and self.U == other.U
            and self.D == other.D
            and self.ring == other.ring
        )

    def __hash__(self):
        return hash((self.U, self.D, self.ring))

    def with_ring(self, ring: RingMode, D: int | None = None) -> "SymmetricAlgebra":
        return SymmetricAlgebra(self.U, self.D if D is None else D, ring)

    # structure on keys
    unit = ()

    def generator(self, name_or_index) -> Monomial:
        i = name_or_index if isinstance(name_or_index, int) else self.U.index(name_or_index)
        return (i,)

    def word_length(self, key: Monomial) -> int:
        return len(key)

    def mul_keys(self, a: Monomial, b: Monomial) -> list[tuple[Monomial, Fraction]]:
        if not a:
            return [(b, Fraction(1))]
        if not b:
            return [(a, Fraction(1))]
        sign, m = normalize(a + b, self.gen_degrees)
        if m is None:
            return []
        if len(m) > self.D:
            raise TruncationOverflow(f"product of word length {len(m)} exceeds D={self.D}; raise D")
        return [(m, Fraction(sign))]

    def comul_key(self, m: Monomial) -> list[tuple[tuple[Monomial, Monomial], Fraction]]:
        cached = self._coprod.get(m)
        if cached is not None:
            return cached
        n = len(m)
        degs = [self.gen_degrees[g] for g in m]
        out: dict = {}
        idx = tuple(range(n))
        for r in range(n + 1):
            for left in combinations(idx, r):
                ls = set(left)
                right = tuple(i for i in idx if i not in ls)
                s = block_sign((left, right), degs)
                key = (tuple(m[i] for i in left), tuple(m[i] for i in right))
                v = out.get(key, 0) + s
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        res = [(k, Fraction(v)) for k, v in out.items()]
        self._coprod[m] = res
        return res

    def counit_key(self, m: Monomial) -> Fraction:
        return Fraction(1) if not m else Fraction(0)

    def conilpotency_index(self) -> int:
        return self.D

    # element-level operations
    def element(self, terms) -> Element:
        return Element(self, terms)

    def one(self) -> Element:
        return Element._raw(self, {(): Scalar.one(self.ring)})

    def gen(self, name, coeff=1) -> Element:
        return Element(self, {self.generator(name): coeff})


def sym_product(x: Element, y: Element) -> Element:
    """Graded commutative product in ``S^{<=D}(U)``.

    Terms whose scalar coefficient vanishes are skipped before the
    word-length check, so only genuinely nonzero overflow raises.
    """
    A = x.space
    out: dict = {}
    for a, ca in x.terms.items():
        for b, cb in y.terms.items():
            c = ca * cb
            if not c.terms:
                continue
            for m, q in A.mul_keys(a, b):
                acc(out, m, c.scale(q))
    return Element._raw(A, out)


def coproduct(x: Element) -> Element:
    A = x.space
    T = TensorSpace(A, A)
    out: dict = {}
    for m, c in x.terms.items():
        for k, q in A.comul_key(m):
            acc(out, k, c.scale(q))
    return Element._raw(T, out)


def _diag_unshuffle(A: SymmetricAlgebra, m: Monomial, k: int, nonempty: bool) -> dict:
    n = len(m)
    degs = [A.gen_degrees[g] for g in m]
    out: dict = {}
    for sizes in compositions(n, k):
        if nonempty and 0 in sizes:
            continue
        for blocks in unshuffle_blocks(sizes):
            s = block_sign(blocks, degs)
            key = tuple(tuple(m[i] for i in b) for b in blocks)
            v = out.get(key, 0) + s
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def _diag_permutation(A: SymmetricAlgebra, m: Monomial, k: int) -> dict:
    n = len(m)
    degs = [A.gen_degrees[g] for g in m]
    out: dict = {}
    for sizes in compositions(n, k):
        denom = 1
        for a in sizes:
            denom *= factorial(a)
        for perm in permutations(range(n)):
            s = koszul_sign(perm, degs)
            blocks = []
            pos = 0
            for a in sizes:
                word = [m[perm[i]] for i in range(pos, pos + a)]
                pos += a
                bs, mono = normalize(word, A.gen_degrees)
                if mono is None:
                    s = 0
                    break
                s *= bs
                blocks.append(mono)
            if not s:
                continue
            key = tuple(blocks)
            v = out.get(key, 0) + Fraction(s, denom)
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def iterated_diagonal(x: Element, k: int, method: str = "unshuffle") -> Element:
    """``delta^{[k-1]}(x)`` in the ``k``-fold tensor power.

    ``method="unshuffle"`` sums over unshuffles with unit coefficients;
    ``method="permutation"`` sums over all of ``S_n`` with weights
    ``1/(a_1! ... a_k!)`` and serves as the reference.
    """
    if k < 1:
        raise ValueError("k must be positive")
    A = x.space
    T = TensorSpace(*([A] * k))
    out: dict = {}
    for m, c in x.terms.items():
        if method == "unshuffle":
            table = _diag_unshuffle(A, m, k, nonempty=False)
        elif method == "permutation":
            table = _diag_permutation(A, m, k)
        else:
            raise ValueError(f"unknown method {method!r}")
        for key, q in table.items():
            acc(out, key, c.scale(q))
    return Element._raw(T, out)


def reduced_diagonal_power(x: Element, k: int) -> Element:
    """``bar-delta^{[k]}(x)``: the iterated reduced diagonal into ``k+1`` factors.

    Only unshuffles with every block nonempty survive, so the result
    vanishes once ``k`` reaches the word length.
    """
    A = x.space
    T = TensorSpace(*([A] * (k + 1)))
    out: dict = {}
    for m, c in x.terms.items():
        if not m:
            continue
        for key, q in _diag_unshuffle(A, m, k + 1, nonempty=True).items():
            acc(out, key, c.scale(q))
    return Element._raw(T, out)


def iterated_product(t: Element, target: SymmetricAlgebra) -> Element:
    """``mu^{[k-1]}``: multiply out a tensor of monomials."""
    out: dict = {}
    for key, c in t.terms.items():
        word = tuple(g for mono in key for g in mono)
        sign, m = normalize(word, target.gen_degrees)
        if m is None:
            continue
        if len(m) > target.D:
            raise TruncationOverflow(f"product of word length {len(m)} exceeds D={target.D}; raise D")
        acc(out, m, c.scale(sign))
    return Element._raw(target, out)


def pi1(A: SymmetricAlgebra) -> LinMap:
    """Projection of ``S^{<=D}(U)`` onto ``S^1(U) = U``."""
    one = Scalar.one(A.ring)
    return LinMap._raw(A, A, {m: {m: one} for m in A.basis if len(m) == 1}, 0)


def word_length_part(x: Element, n: int) -> Element:
    return Element._raw(x.space, {m: c for m, c in x.terms.items() if len(m) == n})


def _mul_terms(A: SymmetricAlgebra, x: dict, y: dict) -> dict:
    out: dict = {}
    for a, ca in x.items():
        for b, cb in y.items():
            c = ca * cb
            if not c.terms:
                continue
            for m, q in A.mul_keys(a, b):
                acc(out, m, c.scale(q))
    return out


def derivation(A: SymmetricAlgebra, values, degree: int) -> LinMap:
    """The graded derivation of the given degree with prescribed generator values.

    ``values`` maps generator names or indices to Elements (or term dicts);
    unlisted generators go to zero.  On a monomial the rule is
    ``D(u_1..u_n) = sum_k (-1)^{degree (|u_1|+..+|u_{k-1}|)} u_1..D(u_k)..u_n``.
    """
    vals = {}
    for g, v in values.items():
        i = g if isinstance(g, int) else A.U.index(g)
        terms = v.terms if isinstance(v, Element) else dict(v)
        for y in terms:
            if A.degree(y) != A.gen_degrees[i] + degree:
                raise ValueError(f"value of {A.U.names[i]} has the wrong degree")
        vals[i] = terms
    one = Scalar.one(A.ring)
    images = {}
    for m in A.basis:
        out: dict = {}
        prefix_deg = 0
        for k, g in enumerate(m):
            if g in vals:
                s = -1 if (degree * prefix_deg) & 1 else 1
                left = _mul_terms(A, {m[:k]: one.scale(s)}, vals[g])
                for y, c in _mul_terms(A, left, {m[k + 1:]: one}).items():
                    acc(out, y, c)
            prefix_deg += A.gen_degrees[g]
        if out:
            images[m] = out
    return LinMap._raw(A, A, images, degree)


def partial_derivative(A: SymmetricAlgebra, gen) -> LinMap:
    """``d/du`` for a generator ``u``; a derivation of degree ``-|u|``."""
    i = gen if isinstance(gen, int) else A.U.index(gen)
    return derivation(A, {i: {(): Scalar.one(A.ring)}}, -A.gen_degrees[i])
