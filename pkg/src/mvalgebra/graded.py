"""Graded bases, elements, Koszul signs, unshuffles and linear maps.

Every graded space used in the package exposes the small protocol of
:class:`GradedSpace`: a finite ordered basis of hashable keys, a degree for
each key, a ground ring and JSON conversion of keys.  Elements and linear
maps are sparse dicts over those keys with :class:`~mvalgebra.scalars.Scalar`
coefficients.

Sign convention: ``(f (x) g)(x (x) y) = (-1)^{|g||x|} f(x) (x) g(y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product
from math import factorial
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import BasisMismatch, SchemaError
from .scalars import RingMode, Scalar


# ---------------------------------------------------------------- signs

def koszul_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of reordering ``u_0 ... u_{n-1}`` into ``u_{perm[0]} ... u_{perm[n-1]}``.

    ``perm`` is in one-line notation, 0-based.  Only pairs of odd elements
    that get inverted contribute a factor of -1.
    """
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation: {perm!r}")
    odd = [degrees[p] & 1 for p in perm]
    inv = 0
    for a in range(n):
        if not odd[a]:
            continue
        pa = perm[a]
        for b in range(a + 1, n):
            if odd[b] and perm[b] < pa:
                inv += 1
    return -1 if inv & 1 else 1


def block_sign(blocks: Sequence[Sequence[int]], degrees: Sequence[int]) -> int:
    """Koszul sign of concatenating index blocks into one permutation."""
    perm = [i for b in blocks for i in b]
    inv = 0
    for a in range(len(perm)):
        if not degrees[perm[a]] & 1:
            continue
        pa = perm[a]
        for b in range(a + 1, len(perm)):
            if degrees[perm[b]] & 1 and perm[b] < pa:
                inv += 1
    return -1 if inv & 1 else 1


# ---------------------------------------------------------------- unshuffles

def _block_choices(items: tuple[int, ...], sizes: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    if not sizes:
        yield ()
        return
    a = sizes[0]
    for chosen in combinations(items, a):
        cs = set(chosen)
        rest = tuple(i for i in items if i not in cs)
        for tail in _block_choices(rest, sizes[1:]):
            yield (chosen,) + tail


def unshuffle_blocks(sizes: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield unshuffles as tuples of blocks, lexicographically."""
    if any(a < 0 for a in sizes):
        raise ValueError("block sizes must be non-negative")
    yield from _block_choices(tuple(range(sum(sizes))), list(sizes))


def unshuffles(sizes: Sequence[int], method: str = "generate") -> list[tuple[int, ...]]:
    """All ``(a_1, ..., a_k)``-unshuffles in one-line notation (0-based).

    ``method="generate"`` chooses block membership directly; ``"filter"``
    scans all of ``S_n`` and keeps the permutations that increase within
    each block.  Both return the same lexicographically ordered list.
    """
    if method == "generate":
        return [tuple(i for b in blocks for i in b) for blocks in unshuffle_blocks(sizes)]
    if method == "filter":
        n = sum(sizes)
        bounds = []
        start = 0
        for a in sizes:
            bounds.append((start, start + a))
            start += a
        out = []
        for p in permutations(range(n)):
            if all(p[i] < p[i + 1] for lo, hi in bounds for i in range(lo, hi - 1)):
                out.append(p)
        return out
    raise ValueError(f"unknown method {method!r}")


def is_unshuffle(perm: Sequence[int], sizes: Sequence[int]) -> bool:
    if sorted(perm) != list(range(sum(sizes))) or len(perm) != sum(sizes):
        return False
    start = 0
    for a in sizes:
        if any(perm[i] > perm[i + 1] for i in range(start, start + a - 1)):
            return False
        start += a
    return True


def multinomial(sizes: Sequence[int]) -> int:
    out = factorial(sum(sizes))
    for a in sizes:
        out //= factorial(a)
    return out


def compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Ordered ``k``-tuples of non-negative integers summing to ``n``."""
    if k == 0:
        if n == 0:
            yield ()
        return
    if k == 1:
        yield (n,)
        return
    for a in range(n + 1):
        for rest in compositions(n - a, k - 1):
            yield (a,) + rest


def set_partitions(items: Sequence[int]) -> Iterator[list[tuple[int, ...]]]:
    """Unordered set partitions; blocks are sorted and ordered by their minimum."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for r in range(len(rest) + 1):
        for others in combinations(rest, r):
            block = (first,) + others
            taken = set(others)
            remaining = [i for i in rest if i not in taken]
            for tail in set_partitions(remaining):
                yield [block] + tail


# ---------------------------------------------------------------- spaces

class GradedSpace:
    """Protocol for finite graded spaces over a ground ring."""

    ring: RingMode

    @property
    def basis(self) -> tuple:
        raise NotImplementedError

    def degree(self, key) -> int:
        raise NotImplementedError

    def key_to_json(self, key):
        raise NotImplementedError

    def key_from_json(self, data):
        raise NotImplementedError

    def same_space(self, other: "GradedSpace") -> bool:
        return self is other or self == other


@dataclass(frozen=True)
class GradedBasis:
    """Ordered list of named atoms with integer degrees."""

    names: tuple[str, ...]
    degrees: tuple[int, ...]

    def __post_init__(self):
        if len(self.names) != len(self.degrees):
            raise ValueError("names and degrees differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("atom names must be unique")

    @classmethod
    def of(cls, atoms: Iterable[tuple[str, int]]) -> "GradedBasis":
        atoms = list(atoms)
        return cls(tuple(a for a, _ in atoms), tuple(int(d) for _, d in atoms))

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SchemaError(f"unknown atom {name!r}") from None

    def to_json(self) -> list:
        return [{"name": n, "degree": d} for n, d in zip(self.names, self.degrees)]

    @classmethod
    def from_json(cls, data) -> "GradedBasis":
        try:
            return cls.of((str(a["name"]), int(a["degree"])) for a in data)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad basis: {exc}") from exc


class FreeSpace(GradedSpace):
    """The free module on a :class:`GradedBasis`; keys are atom indices."""

    def __init__(self, basis: GradedBasis, ring: RingMode):
        self.gb = basis
        self.ring = ring
        self._basis = tuple(range(len(basis)))

    @property
    def basis(self) -> tuple:
        return self._basis

    def degree(self, key: int) -> int:
        return self.gb.degrees[key]

    def key_to_json(self, key: int):
        return self.gb.names[key]

    def key_from_json(self, data) -> int:
        return self.gb.index(str(data))

    def __eq__(self, other):
        return isinstance(other, FreeSpace) and self.gb == other.gb and self.ring == other.ring

    def __hash__(self):
        return hash((self.gb, self.ring))


class TensorSpace(GradedSpace):
    """Tensor product of graded spaces; keys are tuples of factor keys."""

    def __init__(self, *factors: GradedSpace):
        if not factors:
            raise ValueError("need at least one factor")
        ring = factors[0].ring
        for f in factors:
            if f.ring != ring:
                raise BasisMismatch("tensor factors over different rings")
        self.factors = tuple(factors)
        self.ring = ring
        self._basis = None

    @property
    def basis(self) -> tuple:
        if self._basis is None:
            self._basis = tuple(product(*(f.basis for f in self.factors)))
        return self._basis

    def degree(self, key) -> int:
        return sum(f.degree(k) for f, k in zip(self.factors, key))

    def key_to_json(self, key):
        return [f.key_to_json(k) for f, k in zip(self.factors, key)]

    def key_from_json(self, data):
        if not isinstance(data, list) or len(data) != len(self.factors):
            raise SchemaError(f"bad tensor key {data!r}")
        return tuple(f.key_from_json(d) for f, d in zip(self.factors, data))

    def __eq__(self, other):
        return isinstance(other, TensorSpace) and all(
            a.same_space(b) for a, b in zip(self.factors, other.factors)
        ) and len(self.factors) == len(other.factors)

    def __hash__(self):
        return hash(("tensor", len(self.factors)))


def _check_space(a: GradedSpace, b: GradedSpace, what: str) -> None:
    if not a.same_space(b):
        raise BasisMismatch(what)


# ---------------------------------------------------------------- elements

def acc(d: dict, key, s: Scalar) -> None:
    """In place ``d[key] += s`` dropping zeros."""
    if not s.terms:
        return
    old = d.get(key)
    if old is None:
        d[key] = s
        return
    new = old + s
    if new.terms:
        d[key] = new
    else:
        del d[key]


class Element:
    """Finite linear combination of basis keys with Scalar coefficients."""

    __slots__ = ("space", "terms")

    def __init__(self, space: GradedSpace, terms: Mapping | None = None):
        self.space = space
        clean = {}
        if terms:
            ring = space.ring
            for k, c in terms.items():
                if not isinstance(c, Scalar):
                    c = Scalar.const(c, ring)
                if c.terms:
                    clean[k] = c
        self.terms = clean

    @classmethod
    def _raw(cls, space: GradedSpace, terms: dict) -> "Element":
        e = object.__new__(cls)
        e.space = space
        e.terms = terms
        return e

    @classmethod
    def zero(cls, space: GradedSpace) -> "Element":
        return cls._raw(space, {})

    @classmethod
    def basis_element(cls, space: GradedSpace, key, coeff=1) -> "Element":
        return cls(space, {key: coeff})

    @property
    def ring(self) -> RingMode:
        return self.space.ring

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def coeff(self, key) -> Scalar:
        return self.terms.get(key, Scalar.zero(self.ring))

    def __add__(self, other: "Element") -> "Element":
        _check_space(self.space, other.space, "adding elements of different spaces")
        out = dict(self.terms)
        for k, c in other.terms.items():
            acc(out, k, c)
        return Element._raw(self.space, out)

    def __neg__(self) -> "Element":
        return Element._raw(self.space, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, s) -> "Element":
        if not isinstance(s, Scalar):
            s = Scalar.const(s, self.ring)
        out = {}
        for k, c in self.terms.items():
            acc(out, k, c * s)
        return Element._raw(self.space, out)

    def __mul__(self, s):
        if isinstance(s, (int, Fraction, Scalar)):
            return self.scale(s)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.space.same_space(other.space) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degrees(self) -> set[int]:
        return {self.space.degree(k) for k in self.terms}

    def homogeneous_parts(self) -> dict[int, "Element"]:
        parts: dict[int, dict] = {}
        for k, c in self.terms.items():
            parts.setdefault(self.space.degree(k), {})[k] = c
        return {d: Element._raw(self.space, t) for d, t in sorted(parts.items())}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def map_coeffs(self, fn: Callable[[Scalar], Scalar]) -> "Element":
        out = {}
        for k, c in self.terms.items():
            acc(out, k, fn(c))
        return Element._raw(self.space, out)

    def in_maximal_ideal(self) -> bool:
        return all(c.in_maximal_ideal() for c in self.terms.values())

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = [f"({c})*{self.space.key_to_json(k)}" for k, c in self.terms.items()]
        return " + ".join(parts)

    def to_json(self) -> list:
        items = [(self.space.key_to_json(k), c) for k, c in self.terms.items()]
        items.sort(key=lambda kc: repr(kc[0]))
        return [{"atom": a, "coeff": c.to_json()} for a, c in items]

    @classmethod
    def from_json(cls, space: GradedSpace, data) -> "Element":
        if not isinstance(data, list):
            raise SchemaError(f"element must be a list, got {data!r}")
        terms: dict = {}
        for t in data:
            try:
                key = space.key_from_json(t["atom"])
                c = Scalar.from_json(t["coeff"], space.ring)
            except (KeyError, TypeError) as exc:
                raise SchemaError(f"bad element term {t!r}") from exc
            acc(terms, key, c)
        return cls._raw(space, terms)


# ---------------------------------------------------------------- maps

class LinMap:
    """Linear map given by images of basis keys.

    ``degree`` is None for maps that are only homogeneous by parts; the
    homogeneous parts are recovered with :meth:`parts`.
    """

    __slots__ = ("source", "target", "images", "degree")

    def __init__(self, source: GradedSpace, target: GradedSpace, images: Mapping, degree: int | None = None):
        if source.ring != target.ring:
            raise BasisMismatch("source and target over different rings")
        self.source = source
        self.target = target
        clean = {}
        for k, img in images.items():
            if isinstance(img, Element):
                img = img.terms
            img = {y: c for y, c in img.items() if c}
            if img:
                clean[k] = img
        self.images = clean
        self.degree = degree
        if degree is not None:
            for x, img in clean.items():
                dx = source.degree(x)
                for y in img:
                    if target.degree(y) != dx + degree:
                        raise ValueError(
                            f"image of {source.key_to_json(x)} has degree {target.degree(y)}, expected {dx + degree}"
                        )

    @classmethod
    def _raw(cls, source, target, images: dict, degree=None) -> "LinMap":
        m = object.__new__(cls)
        m.source, m.target, m.images, m.degree = source, target, images, degree
        return m

    @property
    def ring(self) -> RingMode:
        return self.source.ring

    @classmethod
    def zero(cls, source, target, degree: int | None = 0) -> "LinMap":
        return cls._raw(source, target, {}, degree)

    @classmethod
    def identity(cls, space: GradedSpace) -> "LinMap":
        one = Scalar.one(space.ring)
        return cls._raw(space, space, {k: {k: one} for k in space.basis}, 0)

    @classmethod
    def from_function(cls, source, target, fn: Callable, degree: int | None = None) -> "LinMap":
        images = {}
        for k in source.basis:
            img = fn(k)
            if isinstance(img, Element):
                img = img.terms
            if img:
                images[k] = dict(img)
        return cls._raw(source, target, images, degree)

    def image(self, key) -> dict:
        return self.images.get(key, {})

    def __call__(self, x: Element) -> Element:
        _check_space(x.space, self.source, "applying map to element of another space")
        return Element._raw(self.target, apply_images(self.images, x.terms))

    def apply_key(self, key) -> Element:
        return Element._raw(self.target, dict(self.images.get(key, {})))

    def term_degrees(self) -> set[int]:
        out = set()
        for x, img in self.images.items():
            dx = self.source.degree(x)
            for y in img:
                out.add(self.target.degree(y) - dx)
        return out

    def is_homogeneous(self, degree: int | None = None) -> bool:
        ds = self.term_degrees()
        if degree is None:
            return len(ds) <= 1
        return ds <= {degree}

    def parts(self) -> dict[int, "LinMap"]:
        parts: dict[int, dict] = {}
        for x, img in self.images.items():
            dx = self.source.degree(x)
            for y, c in img.items():
                d = self.target.degree(y) - dx
                parts.setdefault(d, {}).setdefault(x, {})[y] = c
        return {d: LinMap._raw(self.source, self.target, im, d) for d, im in sorted(parts.items())}

    def __eq__(self, other):
        if not isinstance(other, LinMap):
            return NotImplemented
        return (
            self.source.same_space(other.source)
            and self.target.same_space(other.target)
            and self.images == other.images
        )

    def __hash__(self):
        return id(self)

    def __add__(self, other: "LinMap") -> "LinMap":
        return map_add(self, other)

    def __sub__(self, other: "LinMap") -> "LinMap":
        return map_add(self, map_scale(other, -1))

    def __neg__(self) -> "LinMap":
        return map_scale(self, -1)

    def scale(self, s) -> "LinMap":
        return map_scale(self, s)

    def first_difference(self, other: "LinMap"):
        """A basis key on which the maps differ, with both images, or None."""
        for k in self.source.basis:
            a, b = self.images.get(k, {}), other.images.get(k, {})
            if a != b:
                return k, Element._raw(self.target, dict(a)), Element._raw(other.target, dict(b))
        return None

    def to_json(self) -> list:
        out = []
        for k in self.source.basis:
            img = self.images.get(k)
            if img:
                out.append({"in": self.source.key_to_json(k), "out": Element._raw(self.target, img).to_json()})
        return out

    def __repr__(self) -> str:
        return f"LinMap({len(self.images)} nonzero images, degree={self.degree})"


def apply_images(images: Mapping, terms: Mapping) -> dict:
    out: dict = {}
    for x, c in terms.items():
        img = images.get(x)
        if not img:
            continue
        for y, d in img.items():
            acc(out, y, c * d)
    return out


def map_compose(f: LinMap, g: LinMap) -> LinMap:
    """``f o g``."""
    _check_space(g.target, f.source, "compose: target(g) != source(f)")
    images = {}
    for x, img in g.images.items():
        out = apply_images(f.images, img)
        if out:
            images[x] = out
    deg = None if f.degree is None or g.degree is None else f.degree + g.degree
    return LinMap._raw(g.source, f.target, images, deg)


def map_add(f: LinMap, g: LinMap) -> LinMap:
    _check_space(f.source, g.source, "add: different sources")
    _check_space(f.target, g.target, "add: different targets")
    images = {k: dict(v) for k, v in f.images.items()}
    for k, img in g.images.items():
        d = images.setdefault(k, {})
        for y, c in img.items():
            acc(d, y, c)
        if not d:
            del images[k]
    deg = f.degree if f.degree == g.degree else None
    if not f.images:
        deg = g.degree
    elif not g.images:
        deg = f.degree
    return LinMap._raw(f.source, f.target, images, deg)


def map_scale(f: LinMap, s) -> LinMap:
    if not isinstance(s, Scalar):
        s = Scalar.const(s, f.ring)
    images = {}
    for k, img in f.images.items():
        d = {}
        for y, c in img.items():
            acc(d, y, c * s)
        if d:
            images[k] = d
    return LinMap._raw(f.source, f.target, images, f.degree)


def map_tensor(f: LinMap, g: LinMap) -> LinMap:
    """``f (x) g`` with ``(f (x) g)(x (x) y) = (-1)^{|g||x|} f(x) (x) g(y)``."""
    src = TensorSpace(f.source, g.source)
    tgt = TensorSpace(f.target, g.target)
    images = {}
    for x, fx in f.images.items():
        dx = f.source.degree(x)
        for y, gy in g.images.items():
            dy = g.source.degree(y)
            out: dict = {}
            for y2, c2 in gy.items():
                dg = g.target.degree(y2) - dy
                sign = -1 if (dg * dx) & 1 else 1
                for x2, c1 in fx.items():
                    acc(out, (x2, y2), (c1 * c2).scale(sign))
            if out:
                images[(x, y)] = out
    deg = None if f.degree is None or g.degree is None else f.degree + g.degree
    return LinMap._raw(src, tgt, images, deg)


def tensor_elements(a: Element, b: Element) -> Element:
    space = TensorSpace(a.space, b.space)
    out: dict = {}
    for x, c in a.terms.items():
        for y, d in b.terms.items():
            acc(out, (x, y), c * d)
    return Element._raw(space, out)
