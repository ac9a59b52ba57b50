"""Exact coefficient arithmetic over truncated local ground rings.

Four modes are supported:

``K``
    plain rationals; the maximal ideal is zero.
``HBAR``
    ``Q[h]/(h^H)``; maximal ideal ``(h)``.
``HBAR_AUX``
    ``Q[h, l]/(h^H, l^L)``; maximal ideal ``(h, l)``.
``LAURENT_AUX``
    Laurent polynomials in ``h`` (exponents ``-P <= i < H``) with
    coefficients polynomial in ``l`` mod ``l^L``.  Here ``h`` is a unit and
    the maximal ideal is ``(l)``.

A :class:`Scalar` is an immutable map ``(i, j) -> Fraction`` standing for
``sum q * h^i * l^j``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Union

from .errors import ModeMismatch, NotInMaximalIdeal, PoleOverflow, SchemaError

Rational = Union[int, Fraction]


class Mode(str, enum.Enum):
    K = "k"
    HBAR = "hbar"
    HBAR_AUX = "hbar-aux"
    LAURENT_AUX = "laurent-aux"


@dataclass(frozen=True)
class RingMode:
    mode: Mode = Mode.K
    H: int = 1
    L: int = 1
    P: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.H < 1 or self.L < 1 or self.P < 0:
            raise ValueError(f"invalid truncation orders H={self.H} L={self.L} P={self.P}")
        if self.mode is Mode.K and (self.H, self.L, self.P) != (1, 1, 0):
            raise ValueError("mode K requires H = L = 1 and P = 0")
        if self.mode is Mode.HBAR and (self.L, self.P) != (1, 0):
            raise ValueError("mode HBAR requires L = 1 and P = 0")
        if self.mode is Mode.HBAR_AUX and self.P != 0:
            raise ValueError("mode HBAR_AUX requires P = 0")

    @classmethod
    def k(cls) -> "RingMode":
        return cls(Mode.K)

    @classmethod
    def hbar(cls, H: int) -> "RingMode":
        return cls(Mode.HBAR, H=H)

    @classmethod
    def hbar_aux(cls, H: int, L: int) -> "RingMode":
        return cls(Mode.HBAR_AUX, H=H, L=L)

    @classmethod
    def laurent_aux(cls, H: int, L: int, P: int) -> "RingMode":
        return cls(Mode.LAURENT_AUX, H=H, L=L, P=P)

    @property
    def min_hbar(self) -> int:
        return -self.P

    @property
    def has_hbar(self) -> bool:
        return self.mode is not Mode.K

    @property
    def has_aux(self) -> bool:
        return self.mode in (Mode.HBAR_AUX, Mode.LAURENT_AUX)

    def nilpotency_index(self) -> int:
        """Smallest ``N`` with ``m^N = 0`` in the truncated ring."""
        if self.mode is Mode.K:
            return 1
        if self.mode is Mode.HBAR:
            return self.H
        if self.mode is Mode.HBAR_AUX:
            return self.H + self.L - 1
        return self.L

    def term_in_ideal(self, i: int, j: int) -> bool:
        if self.mode is Mode.K:
            return False
        if self.mode is Mode.LAURENT_AUX:
            return j > 0
        return i > 0 or j > 0

    def to_json(self) -> dict:
        return {"mode": self.mode.value, "H": self.H, "L": self.L, "P": self.P}


class Scalar:
    """Immutable truncated ring element."""

    __slots__ = ("terms", "ring")

    def __init__(self, terms: Mapping[tuple[int, int], Rational] | None, ring: RingMode):
        clean: dict[tuple[int, int], Fraction] = {}
        if terms:
            H, L, P = ring.H, ring.L, ring.P
            for (i, j), q in terms.items():
                if not q:
                    continue
                if j < 0:
                    raise ValueError("negative aux exponent")
                if j >= L or i >= H:
                    continue
                if i < -P:
                    raise PoleOverflow(f"hbar^{i} below pole bound -{P}")
                key = (i, j)
                v = clean.get(key, 0) + Fraction(q)
                if v:
                    clean[key] = v
                else:
                    clean.pop(key, None)
        self.terms = clean
        self.ring = ring

    @classmethod
    def _raw(cls, terms: dict, ring: RingMode) -> "Scalar":
        s = object.__new__(cls)
        s.terms = terms
        s.ring = ring
        return s

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ring: RingMode) -> "Scalar":
        return cls._raw({}, ring)

    @classmethod
    def one(cls, ring: RingMode) -> "Scalar":
        return cls._raw({(0, 0): Fraction(1)}, ring)

    @classmethod
    def const(cls, q: Rational, ring: RingMode) -> "Scalar":
        return cls({(0, 0): q}, ring)

    @classmethod
    def monomial(cls, q: Rational, i: int, j: int, ring: RingMode) -> "Scalar":
        return cls({(i, j): q}, ring)

    @classmethod
    def hbar(cls, ring: RingMode, power: int = 1) -> "Scalar":
        return cls({(power, 0): 1}, ring)

    @classmethod
    def lam(cls, ring: RingMode, power: int = 1) -> "Scalar":
        return cls({(0, power): 1}, ring)

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def in_maximal_ideal(self) -> bool:
        ring = self.ring
        return all(ring.term_in_ideal(i, j) for (i, j) in self.terms)

    def min_hbar_order(self) -> int | None:
        if not self.terms:
            return None
        return min(i for i, _ in self.terms)

    def constant(self) -> Fraction:
        return self.terms.get((0, 0), Fraction(0))

    def residue(self) -> "Scalar":
        """Image modulo the maximal ideal."""
        ring = self.ring
        return Scalar._raw({k: v for k, v in self.terms.items() if not ring.term_in_ideal(*k)}, ring)

    def hbar_part(self, i: int) -> "Scalar":
        return Scalar._raw({k: v for k, v in self.terms.items() if k[0] == i}, self.ring)

    # arithmetic -------------------------------------------------------
    def _check(self, other: "Scalar") -> None:
        if other.ring is not self.ring and other.ring != self.ring:
            raise ModeMismatch(f"{self.ring} vs {other.ring}")

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar.const(other, self.ring)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            w = out.get(k, 0) + v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
        return Scalar._raw(out, self.ring)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw({k: -v for k, v in self.terms.items()}, self.ring)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q: Rational) -> "Scalar":
        if not q:
            return Scalar._raw({}, self.ring)
        return Scalar._raw({k: v * q for k, v in self.terms.items()}, self.ring)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        self._check(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return Scalar._raw({}, self.ring)
        ring = self.ring
        H, L, P = ring.H, ring.L, ring.P
        out: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), c1 in a.items():
            for (i2, j2), c2 in b.items():
                j = j1 + j2
                if j >= L:
                    continue
                i = i1 + i2
                if i >= H:
                    continue
                if i < -P:
                    raise PoleOverflow(f"product term hbar^{i} below pole bound -{P}; raise P")
                k = (i, j)
                v = out.get(k, 0) + c1 * c2
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return Scalar._raw(out, ring)

    __rmul__ = __mul__

    def __truediv__(self, q):
        if isinstance(q, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(q))
        return NotImplemented

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            raise ValueError("negative power")
        out = Scalar.one(self.ring)
        for _ in range(n):
            out = out * self
        return out

    def hbar_shift(self, k: int) -> "Scalar":
        """Multiply by ``h^k``; negative ``k`` is exact division."""
        ring = self.ring
        if k < 0 and ring.mode is not Mode.LAURENT_AUX:
            if any(i + k < 0 for i, _ in self.terms):
                raise PoleOverflow(f"division by h^{-k} not exact in mode {ring.mode.value}")
        return Scalar({(i + k, j): v for (i, j), v in self.terms.items()}, ring)

    def exp(self) -> "Scalar":
        return scalar_exp(self)

    # comparison / display --------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar.const(other, self.ring)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, j), q in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            mon = []
            if i:
                mon.append("h" if i == 1 else f"h^{i}")
            if j:
                mon.append("l" if j == 1 else f"l^{j}")
            if not mon:
                parts.append(str(q))
            elif q == 1:
                parts.append("*".join(mon))
            elif q == -1:
                parts.append("-" + "*".join(mon))
            else:
                parts.append(f"{q}*" + "*".join(mon))
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> list:
        return [
            {"h": i, "l": j, "q": f"{q.numerator}/{q.denominator}"}
            for (i, j), q in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0]))
        ]

    @classmethod
    def from_json(cls, data, ring: RingMode) -> "Scalar":
        if isinstance(data, (int, str)):
            return cls.const(Fraction(data), ring)
        if not isinstance(data, list):
            raise SchemaError(f"scalar must be a list of terms, got {data!r}")
        terms: dict = {}
        for t in data:
            try:
                i, j, q = int(t.get("h", 0)), int(t.get("l", 0)), Fraction(str(t["q"]))
            except (KeyError, ValueError, AttributeError, TypeError) as exc:
                raise SchemaError(f"bad scalar term {t!r}") from exc
            if j and not ring.has_aux:
                raise SchemaError(f"aux exponent in mode {ring.mode.value}")
            if i and not ring.has_hbar:
                raise SchemaError(f"hbar exponent in mode {ring.mode.value}")
            if i < 0 and ring.mode is not Mode.LAURENT_AUX:
                raise SchemaError(f"negative hbar exponent in mode {ring.mode.value}")
            terms[(i, j)] = terms.get((i, j), 0) + q
        return cls(terms, ring)


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def in_maximal_ideal(a: Scalar) -> bool:
    return a.in_maximal_ideal()


def scalar_exp(a: Scalar) -> Scalar:
    """``sum a^k / k!``; finite because the maximal ideal is nilpotent."""
    if not a.in_maximal_ideal():
        raise NotInMaximalIdeal(repr(a))
    out = Scalar.one(a.ring)
    term = Scalar.one(a.ring)
    k = 0
    while True:
        k += 1
        term = (term * a).scale(Fraction(1, k))
        if term.is_zero():
            return out
        out = out + term


def exp_series_coefficients(n: int) -> list[Fraction]:
    return [Fraction(1, factorial(k)) for k in range(n)]


def as_scalar(x, ring: RingMode) -> Scalar:
    if isinstance(x, Scalar):
        return x
    return Scalar.const(x, ring)


def total(scalars: Iterable[Scalar], ring: RingMode) -> Scalar:
    out = Scalar.zero(ring)
    for s in scalars:
        out = out + s
    return out
