"""MV-algebras, the convolution algebra, exp/log and the category of MV-morphisms.

An MV-algebra is a graded space with a commutative unital product, a
conilpotent cocommutative counital coproduct and a square-zero operator
``Delta`` of degree +1 with ``Delta(1) = 0``.  No compatibility between
product and coproduct is assumed.

Three concrete presentations are provided:

* :class:`ExplicitMVAlgebra` with structure constants on a named basis,
* :class:`SymmetricMVAlgebra` on ``S^{<=D}(U)``,
* :class:`TensorMVAlgebra`, the product ``V' (/) V''``.

Linear maps between MV-algebras (:class:`ConvMap`) form the convolution
algebra ``f * g = mu''(f (x) g) delta'`` with unit ``e = eta'' o eps'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Any, Iterable, Mapping, Sequence

from .errors import (
    AxiomViolation,
    BasisMismatch,
    ConvergenceGuardExceeded,
    ModeMismatch,
    NotBialgebra,
    NotConilpotent,
    NotLin0,
    TruncationOverflow,
)
from .graded import (
    Element,
    FreeSpace,
    GradedBasis,
    GradedSpace,
    LinMap,
    acc,
    apply_images,
    map_add,
    map_compose,
    map_scale,
)
from .linalg import EchelonBasis
from .scalars import Mode, RingMode, Scalar
from .symalg import SymmetricAlgebra


# ---------------------------------------------------------------- reports

@dataclass
class Check:
    name: str
    passed: bool
    witness: Any = None

    def to_json(self) -> dict:
        out = {"check": self.name, "pass": self.passed}
        if not self.passed and self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self) -> bool:
        return self.passed

    def add(self, name: str, passed: bool, witness=None) -> None:
        self.checks.append(Check(name, bool(passed), witness))

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def first_failure(self) -> Check | None:
        for c in self.checks:
            if not c.passed:
                return c
        return None

    def to_json(self) -> dict:
        return {"pass": self.passed, "checks": [c.to_json() for c in self.checks]}


# ---------------------------------------------------------------- algebras

def _sign(e: int) -> int:
    return -1 if e & 1 else 1


class MVAlgebra(GradedSpace):
    """Common interface of all MV-algebra presentations.

    Subclasses provide ``basis``, ``degree``, ``unit``, ``mul_keys``,
    ``comul_key``, ``counit_key`` and ``conilpotency_index``; ``Delta``
    is a :class:`LinMap` from the algebra to itself.
    """

    flavor = "abstract"
    D: int | None = None
    Delta: LinMap

    # structure ----------------------------------------------------
    def mul_keys(self, a, b) -> list:
        raise NotImplementedError

    def comul_key(self, a) -> list:
        raise NotImplementedError

    def counit_key(self, a) -> Fraction:
        raise NotImplementedError

    def conilpotency_index(self) -> int:
        raise NotImplementedError

    def _set_delta(self, images: Mapping) -> None:
        self.Delta = LinMap(self, self, images, None)

    # element helpers ----------------------------------------------
    def element(self, terms: Mapping) -> Element:
        return Element(self, terms)

    def one(self) -> Element:
        return Element._raw(self, {self.unit: Scalar.one(self.ring)})

    def zero(self) -> Element:
        return Element._raw(self, {})

    def basis_element(self, key, coeff=1) -> Element:
        return Element(self, {key: coeff})

    def mul(self, x: Element, y: Element) -> Element:
        out: dict = {}
        for a, ca in x.terms.items():
            for b, cb in y.terms.items():
                c = ca * cb
                if not c.terms:
                    continue
                for m, q in self.mul_keys(a, b):
                    acc(out, m, c.scale(q))
        return Element._raw(self, out)

    def counit(self, x: Element) -> Scalar:
        out = Scalar.zero(self.ring)
        for a, c in x.terms.items():
            q = self.counit_key(a)
            if q:
                out = out + c.scale(q)
        return out

    def comul(self, x: Element) -> dict:
        out: dict = {}
        for a, c in x.terms.items():
            for k, q in self.comul_key(a):
                acc(out, k, c.scale(q))
        return out

    def apply_Delta(self, x: Element) -> Element:
        return self.Delta(x)

    def power(self, x: Element, k: int) -> Element:
        out = self.one()
        for _ in range(k):
            out = self.mul(out, x)
        return out

    def alg_exp(self, a: Element) -> Element:
        """``sum a^k / k!`` for ``a`` with coefficients in the maximal ideal."""
        if not a.in_maximal_ideal():
            raise NotLin0("exponential needs coefficients in the maximal ideal")
        return _series(self, a, lambda k: Fraction(1, factorial(k)))

    def alg_log(self, x: Element) -> Element:
        """``log(x)`` for ``x = 1 + a`` with ``a`` in the maximal-ideal part."""
        a = x - self.one()
        if not a.in_maximal_ideal():
            raise NotLin0("logarithm needs x - 1 in the maximal ideal")
        return _series(self, a, lambda k: Fraction(0) if k == 0 else Fraction((-1) ** (k - 1), k))

    def alg_inv_power(self, a: Element, r: int) -> Element:
        """``(1 + a)^{-r}`` for ``a`` in the maximal-ideal part."""
        def coeff(j):
            c = Fraction(1)
            for i in range(j):
                c *= Fraction(-r - i, i + 1)
            return c
        return _series(self, a, coeff)

    def reduce_mod_m(self, x: Element) -> Element:
        return x.map_coeffs(lambda c: c.residue())

    def is_unit_key(self, key) -> bool:
        return key == self.unit

    def word_length(self, key) -> int | None:
        return None


def _series(A: MVAlgebra, a: Element, coeff) -> Element:
    out = A.zero()
    power = A.one()
    k = 0
    guard = A.ring.nilpotency_index() + 1
    while power.terms:
        c = coeff(k)
        if c:
            out = out + power.scale(c)
        k += 1
        if k > guard + 1:
            raise ConvergenceGuardExceeded("algebra power series did not terminate")
        power = A.mul(power, a)
    return out


class ExplicitMVAlgebra(MVAlgebra):
    """MV-algebra from structure constants on a finite named basis.

    ``mu`` maps pairs of atom indices to ``{index: Fraction}``; pairs not
    listed follow graded commutativity from the reversed pair when that is
    listed, the unit rule when one factor is the unit, and are zero
    otherwise.  ``delta`` maps an index to ``{(i, j): Fraction}``; unlisted
    atoms are primitive relative to the counit.  ``eps`` defaults to the
    indicator of the unit.
    """

    flavor = "explicit"

    def __init__(
        self,
        basis: GradedBasis,
        ring: RingMode,
        unit: int | str = 0,
        mu: Mapping | None = None,
        delta: Mapping | None = None,
        eps: Mapping | None = None,
        Delta: Mapping | None = None,
        name: str | None = None,
    ):
        self.gb = basis
        self.ring = ring
        self.space = FreeSpace(basis, ring)
        self.unit = unit if isinstance(unit, int) else basis.index(unit)
        self.name = name
        self._basis = tuple(range(len(basis)))
        self._eps = {i: Fraction(0) for i in self._basis}
        if eps is None:
            self._eps[self.unit] = Fraction(1)
        else:
            for i, q in eps.items():
                self._eps[i] = Fraction(q)
        self._mu_given = {k: {a: Fraction(b) for a, b in v.items() if b} for k, v in (mu or {}).items()}
        self._delta_given = {
            k: {a: Fraction(b) for a, b in v.items() if b} for k, v in (delta or {}).items()
        }
        self._mu: dict = {}
        self._delta: dict = {}
        self._conil: int | None = None
        self._set_delta(Delta or {})

    @property
    def basis(self) -> tuple:
        return self._basis

    def degree(self, key: int) -> int:
        return self.gb.degrees[key]

    def key_to_json(self, key: int):
        return self.gb.names[key]

    def key_from_json(self, data) -> int:
        return self.gb.index(str(data))

    def mul_keys(self, a: int, b: int) -> list:
        r = self._mu.get((a, b))
        if r is not None:
            return r
        if (a, b) in self._mu_given:
            table = self._mu_given[(a, b)]
        elif (b, a) in self._mu_given:
            s = _sign(self.degree(a) * self.degree(b))
            table = {k: s * q for k, q in self._mu_given[(b, a)].items()}
        elif a == self.unit:
            table = {b: Fraction(1)}
        elif b == self.unit:
            table = {a: Fraction(1)}
        else:
            table = {}
        r = list(table.items())
        self._mu[(a, b)] = r
        return r

    def comul_key(self, a: int) -> list:
        r = self._delta.get(a)
        if r is not None:
            return r
        if a in self._delta_given:
            table = dict(self._delta_given[a])
        else:
            u = self.unit
            e = self._eps[a]
            table: dict = {}
            for k, q in (((a, u), 1), ((u, a), 1), ((u, u), -e)):
                v = table.get(k, 0) + q
                if v:
                    table[k] = Fraction(v)
                else:
                    table.pop(k, None)
        r = list(table.items())
        self._delta[a] = r
        return r

    def counit_key(self, a: int) -> Fraction:
        return self._eps[a]

    def conilpotency_index(self) -> int:
        if self._conil is None:
            self._conil = conilpotency_index(self)
        return self._conil

    def presentation(self) -> dict:
        """Full structure-constant tables (with defaults filled in)."""
        mu = {}
        for a in self.basis:
            for b in self.basis:
                r = self.mul_keys(a, b)
                if r:
                    mu[(a, b)] = dict(r)
        delta = {a: dict(self.comul_key(a)) for a in self.basis}
        return {"mu": mu, "delta": delta, "eps": dict(self._eps)}

    def __repr__(self):
        return f"ExplicitMVAlgebra({self.name or list(self.gb.names)})"


class SymmetricMVAlgebra(MVAlgebra):
    """``S^{<=D}(U)`` with its shuffle coproduct and a given ``Delta``."""

    flavor = "symmetric"

    def __init__(self, sym: SymmetricAlgebra, Delta: Mapping | None = None, name: str | None = None):
        self.sym = sym
        self.ring = sym.ring
        self.D = sym.D
        self.U = sym.U
        self.unit = ()
        self.name = name
        self._mul: dict = {}
        self._set_delta(Delta or {})

    @classmethod
    def free(cls, generators: Iterable[tuple[str, int]] | GradedBasis, D: int, ring: RingMode,
             Delta: Mapping | None = None) -> "SymmetricMVAlgebra":
        gb = generators if isinstance(generators, GradedBasis) else GradedBasis.of(generators)
        return cls(SymmetricAlgebra(gb, D, ring), Delta)

    @property
    def basis(self) -> tuple:
        return self.sym.basis

    def degree(self, key) -> int:
        return self.sym.degree(key)

    def key_to_json(self, key):
        return self.sym.key_to_json(key)

    def key_from_json(self, data):
        return self.sym.key_from_json(data)

    def mul_keys(self, a, b) -> list:
        r = self._mul.get((a, b))
        if r is None:
            try:
                r = self.sym.mul_keys(a, b)
            except TruncationOverflow as exc:
                r = exc
            self._mul[(a, b)] = r
        if isinstance(r, TruncationOverflow):
            raise TruncationOverflow(str(r))
        return r

    def comul_key(self, a) -> list:
        return self.sym.comul_key(a)

    def counit_key(self, a) -> Fraction:
        return Fraction(1) if not a else Fraction(0)

    def conilpotency_index(self) -> int:
        return self.D

    def word_length(self, key) -> int:
        return len(key)

    def gen(self, name, coeff=1) -> Element:
        return Element(self, {self.sym.generator(name): coeff})

    def monomial(self, *names) -> tuple:
        from .symalg import normalize
        sign, m = normalize([self.U.index(n) for n in names], self.U.degrees)
        if m is None or sign != 1:
            raise ValueError(f"{names} is not a sorted nonzero monomial")
        return m

    def __repr__(self):
        return f"SymmetricMVAlgebra({self.name or list(self.U.names)}, D={self.D})"


class TensorMVAlgebra(MVAlgebra):
    """``V' (/) V''``: graded tensor product of two MV-algebras."""

    flavor = "tensor"

    def __init__(self, left: MVAlgebra, right: MVAlgebra):
        if left.ring != right.ring:
            raise ModeMismatch(f"{left.ring} vs {right.ring}")
        self.left, self.right = left, right
        self.ring = left.ring
        self.unit = (left.unit, right.unit)
        self._basis = tuple(product(left.basis, right.basis))
        images = {}
        for a, b in self._basis:
            out: dict = {}
            sa = _sign(left.degree(a))
            for a2, c in left.Delta.image(a).items():
                acc(out, (a2, b), c)
            for b2, c in right.Delta.image(b).items():
                acc(out, (a, b2), c.scale(sa))
            if out:
                images[(a, b)] = out
        self.Delta = LinMap._raw(self, self, images, None)
        self._mul: dict = {}
        self._comul: dict = {}

    @property
    def basis(self) -> tuple:
        return self._basis

    def degree(self, key) -> int:
        return self.left.degree(key[0]) + self.right.degree(key[1])

    def key_to_json(self, key):
        return [self.left.key_to_json(key[0]), self.right.key_to_json(key[1])]

    def key_from_json(self, data):
        return (self.left.key_from_json(data[0]), self.right.key_from_json(data[1]))

    def mul_keys(self, x, y) -> list:
        r = self._mul.get((x, y))
        if r is not None:
            return r
        (a1, b1), (a2, b2) = x, y
        s = _sign(self.right.degree(b1) * self.left.degree(a2))
        out: dict = {}
        for a, p in self.left.mul_keys(a1, a2):
            for b, q in self.right.mul_keys(b1, b2):
                v = out.get((a, b), 0) + s * p * q
                if v:
                    out[(a, b)] = v
                else:
                    out.pop((a, b), None)
        r = list(out.items())
        self._mul[(x, y)] = r
        return r

    def comul_key(self, x) -> list:
        r = self._comul.get(x)
        if r is not None:
            return r
        a, b = x
        out: dict = {}
        for (a1, a2), p in self.left.comul_key(a):
            for (b1, b2), q in self.right.comul_key(b):
                s = _sign(self.left.degree(a2) * self.right.degree(b1))
                k = ((a1, b1), (a2, b2))
                v = out.get(k, 0) + s * p * q
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        r = list(out.items())
        self._comul[x] = r
        return r

    def counit_key(self, x) -> Fraction:
        return self.left.counit_key(x[0]) * self.right.counit_key(x[1])

    def conilpotency_index(self) -> int:
        return self.left.conilpotency_index() + self.right.conilpotency_index()

    def __repr__(self):
        return f"TensorMVAlgebra({self.left!r}, {self.right!r})"


# ---------------------------------------------------------------- rational tensors

def _rt_add(d: dict, k, q) -> None:
    v = d.get(k, 0) + q
    if v:
        d[k] = v
    else:
        d.pop(k, None)


def _project_I(A: MVAlgebra, vec: Mapping) -> dict:
    """``p(v) = v - eps(v) 1`` on a rational vector."""
    out = dict(vec)
    e = sum((q * A.counit_key(k) for k, q in vec.items()), Fraction(0))
    if e:
        _rt_add(out, A.unit, -e)
    return out


def _reduced_comul_vec(A: MVAlgebra, vec: Mapping) -> dict:
    """``(p (x) p) delta`` on a rational vector, output keyed by pairs."""
    out: dict = {}
    u = A.unit
    for k, q in vec.items():
        for (a, b), r in A.comul_key(k):
            qa = q * r
            ea, eb = A.counit_key(a), A.counit_key(b)
            _rt_add(out, (a, b), qa)
            if ea:
                _rt_add(out, (u, b), -qa * ea)
            if eb:
                _rt_add(out, (a, u), -qa * eb)
            if ea and eb:
                _rt_add(out, (u, u), qa * ea * eb)
    return out


def conilpotency_index(A: MVAlgebra, bound: int | None = None) -> int:
    """Smallest ``c`` with ``bar-delta^{[c]} = 0`` on the augmentation ideal."""
    if bound is None:
        bound = len(A.basis) + 1
    worst = 0
    for x in A.basis:
        cur = {(k,): q for k, q in _project_I(A, {x: Fraction(1)}).items()}
        c = 0
        while cur:
            if c > bound:
                raise NotConilpotent(f"reduced diagonal of {A.key_to_json(x)} does not vanish within {bound} steps")
            nxt: dict = {}
            for key, q in cur.items():
                head, rest = key[0], key[1:]
                for (a, b), r in _reduced_comul_vec(A, {head: q}).items():
                    _rt_add(nxt, (a, b) + rest, r)
            cur = nxt
            c += 1
        worst = max(worst, c)
    return worst


# ---------------------------------------------------------------- validation

def _rat_mul(A: MVAlgebra, x: Mapping, y: Mapping) -> dict:
    out: dict = {}
    for a, p in x.items():
        for b, q in y.items():
            for m, r in A.mul_keys(a, b):
                _rt_add(out, m, p * q * r)
    return out


def validate_mv(A: MVAlgebra, basis_keys: Sequence | None = None) -> Report:
    """Check every MV-algebra axiom separately.

    Products that leave the truncated space are skipped, since the
    truncated object only represents the untruncated one where defined.
    """
    rep = Report()
    B = list(A.basis if basis_keys is None else basis_keys)
    u = A.unit

    def first(pred_iter):
        for w in pred_iter:
            if w is not None:
                return w
        return None

    def safe(fn, *args):
        try:
            return fn(*args)
        except TruncationOverflow:
            return None

    # product
    def mu_deg():
        for a in B:
            for b in B:
                r = safe(A.mul_keys, a, b)
                for m, _ in r or []:
                    if A.degree(m) != A.degree(a) + A.degree(b):
                        return {"a": A.key_to_json(a), "b": A.key_to_json(b)}
        return None

    def mu_assoc():
        for a in B:
            for b in B:
                ab = safe(A.mul_keys, a, b)
                if ab is None:
                    continue
                for c in B:
                    left = safe(_rat_mul, A, dict(ab), {c: Fraction(1)})
                    if left is None:
                        continue
                    bc = safe(A.mul_keys, b, c)
                    if bc is None:
                        continue
                    right = safe(_rat_mul, A, {a: Fraction(1)}, dict(bc))
                    if right is None:
                        continue
                    if left != right:
                        return {"a": A.key_to_json(a), "b": A.key_to_json(b), "c": A.key_to_json(c)}
        return None

    def mu_comm():
        for i, a in enumerate(B):
            for b in B[i:]:
                ab = safe(A.mul_keys, a, b)
                ba = safe(A.mul_keys, b, a)
                if ab is None or ba is None:
                    continue
                s = _sign(A.degree(a) * A.degree(b))
                if dict(ab) != {k: s * q for k, q in ba}:
                    return {"a": A.key_to_json(a), "b": A.key_to_json(b)}
        return None

    def mu_unit():
        for a in B:
            if dict(A.mul_keys(u, a)) != {a: 1} or dict(A.mul_keys(a, u)) != {a: 1}:
                return {"a": A.key_to_json(a)}
        return None

    rep.add("mu_degree", (w := mu_deg()) is None, w)
    rep.add("mu_associative", (w := mu_assoc()) is None, w)
    rep.add("mu_commutative", (w := mu_comm()) is None, w)
    rep.add("mu_unital", (w := mu_unit()) is None, w)

    # coproduct
    def delta_deg():
        for a in B:
            for (x, y), _ in A.comul_key(a):
                if A.degree(x) + A.degree(y) != A.degree(a):
                    return {"a": A.key_to_json(a)}
        return None

    def delta_coassoc():
        for a in B:
            left: dict = {}
            right: dict = {}
            for (x, y), q in A.comul_key(a):
                for (x1, x2), r in A.comul_key(x):
                    _rt_add(left, (x1, x2, y), q * r)
                for (y1, y2), r in A.comul_key(y):
                    _rt_add(right, (x, y1, y2), q * r)
            if left != right:
                return {"a": A.key_to_json(a)}
        return None

    def delta_cocomm():
        for a in B:
            d = dict(A.comul_key(a))
            flipped: dict = {}
            for (x, y), q in d.items():
                _rt_add(flipped, (y, x), q * _sign(A.degree(x) * A.degree(y)))
            if d != flipped:
                return {"a": A.key_to_json(a)}
        return None

    def delta_counit():
        for a in B:
            left: dict = {}
            right: dict = {}
            for (x, y), q in A.comul_key(a):
                ex, ey = A.counit_key(x), A.counit_key(y)
                if ex:
                    _rt_add(left, y, q * ex)
                if ey:
                    _rt_add(right, x, q * ey)
            if left != {a: 1} or right != {a: 1}:
                return {"a": A.key_to_json(a)}
        return None

    rep.add("delta_degree", (w := delta_deg()) is None, w)
    rep.add("delta_coassociative", (w := delta_coassoc()) is None, w)
    rep.add("delta_cocommutative", (w := delta_cocomm()) is None, w)
    rep.add("delta_counital", (w := delta_counit()) is None, w)

    # unit / counit compatibility
    rep.add("eps_eta", A.counit_key(u) == 1, {"eps(1)": str(A.counit_key(u))})

    def eps_mult():
        for a in B:
            for b in B:
                ab = safe(A.mul_keys, a, b)
                if ab is None:
                    continue
                lhs = sum((q * A.counit_key(m) for m, q in ab), Fraction(0))
                if lhs != A.counit_key(a) * A.counit_key(b):
                    return {"a": A.key_to_json(a), "b": A.key_to_json(b)}
        return None

    rep.add("eps_multiplicative", (w := eps_mult()) is None, w)
    rep.add("coaugmentation", dict(A.comul_key(u)) == {(u, u): 1}, None)
    rep.add("eps_degree", all(A.degree(a) == 0 for a in B if A.counit_key(a)), None)

    try:
        c = conilpotency_index(A)
        rep.add("conilpotent", True)
    except NotConilpotent as exc:
        rep.add("conilpotent", False, str(exc))

    # Delta
    D = A.Delta
    bad_deg = [A.key_to_json(x) for x, img in D.images.items() for y in img if A.degree(y) != A.degree(x) + 1]
    rep.add("Delta_degree", not bad_deg, {"in": bad_deg[0]} if bad_deg else None)
    sq = map_compose(D, D)
    w = None
    if sq.images:
        x = next(k for k in A.basis if k in sq.images)
        w = {"in": A.key_to_json(x), "Delta^2": Element._raw(A, sq.images[x]).to_json()}
    rep.add("Delta_square_zero", not sq.images, w)
    rep.add("Delta_unit", not D.image(u), {"Delta(1)": Element._raw(A, dict(D.image(u))).to_json()} if D.image(u) else None)
    return rep


def is_bialgebra(A: MVAlgebra) -> bool:
    """``delta(xy) = delta(x) delta(y)`` on all basis pairs that fit."""
    cached = getattr(A, "_is_bialgebra", None)
    if cached is not None:
        return cached
    ok = True
    for a in A.basis:
        da = A.comul_key(a)
        for b in A.basis:
            try:
                ab = A.mul_keys(a, b)
                lhs: dict = {}
                for m, q in ab:
                    for k, r in A.comul_key(m):
                        _rt_add(lhs, k, q * r)
                rhs: dict = {}
                for (a1, a2), p in da:
                    for (b1, b2), q in A.comul_key(b):
                        s = _sign(A.degree(a2) * A.degree(b1))
                        for m1, r1 in A.mul_keys(a1, b1):
                            for m2, r2 in A.mul_keys(a2, b2):
                                _rt_add(rhs, (m1, m2), s * p * q * r1 * r2)
            except TruncationOverflow:
                continue
            if lhs != rhs:
                ok = False
                break
        if not ok:
            break
    try:
        A._is_bialgebra = ok
    except AttributeError:
        pass
    return ok


# ---------------------------------------------------------------- constructors

def _raise_if_invalid(A: MVAlgebra, names: Sequence[str]) -> MVAlgebra:
    rep = validate_mv(A)
    for n in names:
        c = rep.get(n)
        if not c.passed:
            raise AxiomViolation(n, c.witness)
    return A


_ALL_AXIOMS = (
    "mu_degree", "mu_associative", "mu_commutative", "mu_unital",
    "delta_degree", "delta_coassociative", "delta_cocommutative", "delta_counital",
    "eps_eta", "eps_multiplicative", "coaugmentation", "eps_degree", "conilpotent",
    "Delta_degree", "Delta_square_zero", "Delta_unit",
)


def _idx(basis: GradedBasis, k):
    if isinstance(k, tuple):
        return tuple(_idx(basis, x) for x in k)
    return k if isinstance(k, int) else basis.index(k)


def _index_map(basis: GradedBasis, m: Mapping | None) -> dict:
    """Accept tables keyed by names or indices (also inside values)."""
    if not m:
        return {}
    out = {}
    for k, v in m.items():
        if isinstance(v, Mapping):
            v = {_idx(basis, a): b for a, b in v.items()}
        out[_idx(basis, k)] = v
    return out


def _scal_images(basis: GradedBasis, ring: RingMode, Delta: Mapping | None) -> dict:
    images = {}
    for k, img in (Delta or {}).items():
        i = k if isinstance(k, int) else basis.index(k)
        d = {}
        for y, c in (img.terms.items() if isinstance(img, Element) else img.items()):
            j = y if isinstance(y, int) else basis.index(y)
            acc(d, j, c if isinstance(c, Scalar) else Scalar.const(c, ring))
        images[i] = d
    return images


def make_supertrivial(V: GradedBasis, eps: Mapping, eta: int | str, Delta: Mapping | None,
                      ring: RingMode, name: str | None = None) -> ExplicitMVAlgebra:
    """The supertrivial MV-algebra on ``V``.

    ``I = Ker(eps)`` squares to zero and consists of primitives; ``eps`` is
    taken as given (it is a choice of right inverse of ``eta``).
    """
    unit = eta if isinstance(eta, int) else V.index(eta)
    e = {i: Fraction(0) for i in range(len(V))}
    for k, q in _index_map(V, eps).items():
        e[k] = Fraction(q)
    if e[unit] != 1:
        raise AxiomViolation("eps_eta", {"eps(1)": str(e[unit])})
    mu = {}
    for a in range(len(V)):
        for b in range(len(V)):
            # x y = eps(x) y + eps(y) x - eps(x) eps(y) 1, since I.I = 0
            t: dict = {}
            for k, q in ((b, e[a]), (a, e[b]), (unit, -e[a] * e[b])):
                _rt_add(t, k, q)
            mu[(a, b)] = t
    A = ExplicitMVAlgebra(V, ring, unit=unit, mu=mu, eps=e, Delta=_scal_images(V, ring, Delta), name=name)
    return _raise_if_invalid(A, _ALL_AXIOMS)


def make_trivial_coproduct(basis: GradedBasis, mu: Mapping, ring: RingMode, unit: int | str = 0,
                           eps: Mapping | None = None, Delta: Mapping | None = None,
                           name: str | None = None) -> ExplicitMVAlgebra:
    """A commutative augmented algebra with every element of ``Ker(eps)`` primitive."""
    A = ExplicitMVAlgebra(
        basis, ring, unit=unit,
        mu=_index_map(basis, mu),
        eps=_index_map(basis, eps) if eps else None,
        Delta=_scal_images(basis, ring, Delta), name=name,
    )
    return _raise_if_invalid(A, _ALL_AXIOMS)


def make_trivial_product(basis: GradedBasis, delta: Mapping, ring: RingMode, unit: int | str = 0,
                         eps: Mapping | None = None, Delta: Mapping | None = None,
                         name: str | None = None) -> ExplicitMVAlgebra:
    """A coaugmented coalgebra with ``Ker(eps)`` squaring to zero."""
    u = unit if isinstance(unit, int) else basis.index(unit)
    e = {i: Fraction(0) for i in range(len(basis))}
    e[u] = Fraction(1)
    for k, q in _index_map(basis, eps).items():
        e[k] = Fraction(q)
    mu = {}
    for a in range(len(basis)):
        for b in range(len(basis)):
            t: dict = {}
            for k, q in ((b, e[a]), (a, e[b]), (u, -e[a] * e[b])):
                _rt_add(t, k, q)
            mu[(a, b)] = t
    dl = _index_map(basis, delta)
    A = ExplicitMVAlgebra(basis, ring, unit=u, mu=mu, delta=dl, eps=e,
                          Delta=_scal_images(basis, ring, Delta), name=name)
    return _raise_if_invalid(A, _ALL_AXIOMS)


def ground_algebra(ring: RingMode) -> ExplicitMVAlgebra:
    """The MV-algebra ``k``: ``delta(1) = 1 (x) 1`` and ``Delta = 0``."""
    return ExplicitMVAlgebra(GradedBasis(("1",), (0,)), ring, unit=0, name="k")


def truncated_polynomial_algebra(n: int, ring: RingMode, var: str = "x") -> ExplicitMVAlgebra:
    """``k[x]/(x^n)`` with ``x`` of degree 0 and trivial coproduct."""
    names = ["1"] + [var if i == 1 else f"{var}^{i}" for i in range(1, n)]
    gb = GradedBasis(tuple(names), (0,) * n)
    mu = {(a, b): ({a + b: 1} if a + b < n else {}) for a in range(n) for b in range(n)}
    return make_trivial_coproduct(gb, mu, ring, name=f"k[{var}]/({var}^{n})")


def exterior_algebra(ring: RingMode, var: str = "xi", degree: int = 1) -> ExplicitMVAlgebra:
    gb = GradedBasis(("1", var), (0, degree))
    return make_trivial_coproduct(gb, {}, ring, name=f"Lambda[{var}]")


def divided_power_coalgebra(n: int, ring: RingMode, var: str = "x") -> ExplicitMVAlgebra:
    """Divided powers ``x^{(i)}, i < n`` with trivial product."""
    names = ["1"] + [f"{var}({i})" for i in range(1, n)]
    gb = GradedBasis(tuple(names), (0,) * n)
    delta = {i: {(a, i - a): 1 for a in range(i + 1)} for i in range(n)}
    return make_trivial_product(gb, delta, ring, name=f"Gamma[{var}]/{n}")


# ---------------------------------------------------------------- convolution

class ConvMap(LinMap):
    """Element of the convolution algebra ``Lin(V', V'')`` (homogeneous by parts)."""

    __slots__ = ()

    @classmethod
    def of(cls, source: MVAlgebra, target: MVAlgebra, images: Mapping) -> "ConvMap":
        return cls(source, target, images, None)

    @classmethod
    def wrap(cls, m: LinMap) -> "ConvMap":
        return cls._raw(m.source, m.target, m.images, m.degree)

    def __call__(self, x: Element) -> Element:
        return Element._raw(self.target, apply_images(self.images, x.terms))


def _cm(source, target, images, degree=None) -> ConvMap:
    return ConvMap._raw(source, target, images, degree)


def _same(a, b, what):
    if not (a is b or a.same_space(b)):
        raise BasisMismatch(what)


def conv_unit(source: MVAlgebra, target: MVAlgebra) -> ConvMap:
    """``e = eta'' o eps'``."""
    images = {}
    for x in source.basis:
        q = source.counit_key(x)
        if q:
            images[x] = {target.unit: Scalar.const(q, target.ring)}
    return _cm(source, target, images, 0)


def identity_map(A: MVAlgebra) -> ConvMap:
    return ConvMap.wrap(LinMap.identity(A))


def zero_map(source: MVAlgebra, target: MVAlgebra) -> ConvMap:
    return _cm(source, target, {}, 0)


def _convolve(f_im: Mapping, g_im: Mapping, src: MVAlgebra, tgt: MVAlgebra, keys=None) -> dict:
    out = {}
    sdeg, tdeg = src.degree, tgt.degree
    for x in (src.basis if keys is None else keys):
        res: dict = {}
        for (x1, x2), q in src.comul_key(x):
            fx = f_im.get(x1)
            if not fx:
                continue
            gx = g_im.get(x2)
            if not gx:
                continue
            d1, d2 = sdeg(x1), sdeg(x2)
            for y2, c2 in gx.items():
                s = -1 if ((tdeg(y2) - d2) * d1) & 1 else 1
                for y1, c1 in fx.items():
                    c = c1 * c2
                    if not c.terms:
                        continue
                    for m, r in tgt.mul_keys(y1, y2):
                        acc(res, m, c.scale(q * s * r))
        if res:
            out[x] = res
    return out


def convolution(f: LinMap, g: LinMap) -> ConvMap:
    """``f * g = mu''(f (x) g) delta'``."""
    _same(f.source, g.source, "convolution: different sources")
    _same(f.target, g.target, "convolution: different targets")
    deg = None if f.degree is None or g.degree is None else f.degree + g.degree
    return _cm(f.source, f.target, _convolve(f.images, g.images, f.source, f.target), deg)


def is_lin0(f: LinMap) -> bool:
    """``f(1)`` has all coefficients in the maximal ideal."""
    return all(c.in_maximal_ideal() for c in f.image(f.source.unit).values())


def is_degree_zero(f: LinMap) -> bool:
    return f.term_degrees() <= {0}


def _guard(f: LinMap) -> int:
    return f.source.conilpotency_index() + f.ring.nilpotency_index() + 1


def _fast_path_ok(f: LinMap) -> bool:
    return isinstance(f.source, SymmetricMVAlgebra) and is_degree_zero(f)


def _exp_series(f: LinMap) -> ConvMap:
    src, tgt = f.source, f.target
    e = conv_unit(src, tgt)
    total = {k: dict(v) for k, v in e.images.items()}
    term = e.images
    guard = _guard(f)
    k = 0
    while True:
        k += 1
        if k > guard:
            raise ConvergenceGuardExceeded(f"exp did not terminate within {guard} convolution powers")
        term = _convolve(term, f.images, src, tgt)
        inv = Fraction(1, k)
        term = {x: {y: c.scale(inv) for y, c in img.items()} for x, img in term.items()}
        if not term:
            break
        for x, img in term.items():
            d = total.setdefault(x, {})
            for y, c in img.items():
                acc(d, y, c)
            if not d:
                del total[x]
    return _cm(src, tgt, total, None)


def _log_series(g_im: Mapping, src: MVAlgebra, tgt: MVAlgebra, guard: int) -> ConvMap:
    total: dict = {}
    power = g_im
    k = 0
    while power:
        k += 1
        if k > guard:
            raise ConvergenceGuardExceeded(f"log did not terminate within {guard} convolution powers")
        coef = Fraction((-1) ** (k - 1), k)
        for x, img in power.items():
            d = total.setdefault(x, {})
            for y, c in img.items():
                acc(d, y, c.scale(coef))
            if not d:
                del total[x]
        power = _convolve(power, g_im, src, tgt)
    return _cm(src, tgt, total, None)


def _sub_blocks(m: tuple, src: SymmetricMVAlgebra):
    """Blocks ``B`` containing the first letter, with the sign of ``m -> B, rest``."""
    from itertools import combinations
    from .graded import block_sign
    n = len(m)
    degs = [src.U.degrees[g] for g in m]
    rest_idx = tuple(range(1, n))
    out = []
    for r in range(n):
        for others in combinations(rest_idx, r):
            blk = (0,) + others
            taken = set(blk)
            rest = tuple(i for i in range(n) if i not in taken)
            s = block_sign((blk, rest), degs)
            out.append((tuple(m[i] for i in blk), tuple(m[i] for i in rest), s))
    return out


def _exp_partition(f: LinMap) -> ConvMap:
    """``exp(f)(x) = sum over set partitions of e^{f(1)} prod f(B)``.

    Valid for degree-0 ``f`` out of ``S^{<=D}(U)``: grouping the labelled
    blocks of ``f^{*k}`` by their underlying unordered partition turns the
    ``1/k!`` weights into the exponential of ``f(1)``.
    """
    src, tgt = f.source, f.target
    a = Element._raw(tgt, dict(f.image(src.unit)))
    memo: dict = {(): tgt.alg_exp(a).terms}
    for m in sorted(src.basis, key=len):
        if not m:
            continue
        res: dict = {}
        for blk, rest, s in _sub_blocks(m, src):
            fb = f.images.get(blk)
            if not fb:
                continue
            er = memo[rest]
            if not er:
                continue
            for y1, c1 in fb.items():
                for y2, c2 in er.items():
                    c = c1 * c2
                    if not c.terms:
                        continue
                    for mm, q in tgt.mul_keys(y1, y2):
                        acc(res, mm, c.scale(s * q))
        memo[m] = res
    return _cm(src, tgt, {k: v for k, v in memo.items() if v}, None)


def _log_partition(phi: LinMap) -> ConvMap:
    """``log(phi)(x) = sum over partitions with r blocks of F^{(r)}(a) prod g(B)``.

    Here ``g = phi - e``, ``a = g(1)`` and ``F(t) = log(1 + t)``, so that
    ``F^{(r)}(a) = (-1)^{r-1} (r-1)! (1 + a)^{-r}`` for ``r >= 1``.
    """
    src, tgt = phi.source, phi.target
    g_im = dict(phi.images)
    one_img = dict(g_im.get(src.unit, {}))
    acc(one_img, tgt.unit, Scalar.const(-1, tgt.ring))
    a = Element._raw(tgt, one_img)
    if not a.in_maximal_ideal():
        raise NotLin0("log needs phi(1) - 1 in the maximal ideal")
    g_im[src.unit] = one_img
    base: dict = {}

    def F(r):
        if r not in base:
            if r == 0:
                base[r] = tgt.alg_log(tgt.one() + a).terms
            else:
                c = Fraction((-1) ** (r - 1) * factorial(r - 1))
                base[r] = tgt.alg_inv_power(a, r).scale(c).terms
        return base[r]

    memo: dict = {}

    def L(m, r):
        key = (m, r)
        if key in memo:
            return memo[key]
        if not m:
            res = F(r)
        else:
            res = {}
            for blk, rest, s in _sub_blocks(m, src):
                gb = g_im.get(blk)
                if not gb:
                    continue
                er = L(rest, r + 1)
                if not er:
                    continue
                for y1, c1 in gb.items():
                    for y2, c2 in er.items():
                        c = c1 * c2
                        if not c.terms:
                            continue
                        for mm, q in tgt.mul_keys(y1, y2):
                            acc(res, mm, c.scale(s * q))
        memo[key] = res
        return res

    images = {}
    for m in src.basis:
        v = L(m, 0)
        if v:
            images[m] = dict(v)
    return _cm(src, tgt, images, None)


def exp_map(f: LinMap, method: str = "auto") -> ConvMap:
    """``exp(f) = sum f^{*k}/k!`` for ``f`` in ``Lin^0``.

    ``method="series"`` accumulates convolution powers until they vanish
    (with a guard from conilpotency and scalar nilpotency);
    ``method="partition"`` uses the set-partition formula valid for
    degree-0 maps out of ``S^{<=D}(U)``; ``"auto"`` picks the latter when
    it applies.
    """
    if not is_lin0(f):
        raise NotLin0("exp requires f(1) in the maximal ideal")
    if method == "auto":
        method = "partition" if _fast_path_ok(f) else "series"
    if method == "partition":
        if not _fast_path_ok(f):
            raise ValueError("partition formula needs a degree-0 map out of a symmetric algebra")
        return _exp_partition(f)
    if method == "series":
        return _exp_series(f)
    raise ValueError(f"unknown method {method!r}")


def log_map(phi: LinMap, method: str = "auto") -> ConvMap:
    """``log(e + g) = g - g^{*2}/2 + g^{*3}/3 - ...`` for ``g = phi - e`` in ``Lin^0``."""
    src, tgt = phi.source, phi.target
    e = conv_unit(src, tgt)
    g = map_add(phi, map_scale(e, -1))
    if not is_lin0(g):
        raise NotLin0("log requires phi - e in Lin^0")
    if method == "auto":
        method = "partition" if _fast_path_ok(phi) else "series"
    if method == "partition":
        if not _fast_path_ok(phi):
            raise ValueError("partition formula needs a degree-0 map out of a symmetric algebra")
        return _log_partition(phi)
    if method == "series":
        return _log_series(g.images, src, tgt, _guard(g))
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------- morphisms

def compose(f: LinMap, g: LinMap) -> ConvMap:
    """Plain composition ``f o g``."""
    return ConvMap.wrap(map_compose(f, g))


def _map_witness(A: MVAlgebra, lhs: LinMap, rhs: LinMap, names=("lhs", "rhs")):
    d = lhs.first_difference(rhs)
    if d is None:
        return None
    k, a, b = d
    return {"in": A.key_to_json(k), names[0]: a.to_json(), names[1]: b.to_json()}


def mv_morphism_witness(f: LinMap):
    """None if ``Delta'' o exp(f) = exp(f) o Delta'``, else a witness dict."""
    if not is_lin0(f):
        return {"reason": "f(1) not in the maximal ideal"}
    if not is_degree_zero(f):
        return {"reason": "f is not of degree 0"}
    E = exp_map(f)
    lhs = map_compose(f.target.Delta, E)
    rhs = map_compose(E, f.source.Delta)
    return _map_witness(f.source, lhs, rhs, ("Delta''(exp f)", "exp f(Delta')"))


def is_mv_morphism(f: LinMap) -> bool:
    return mv_morphism_witness(f) is None


def tilde_morphism_witness(phi: LinMap):
    src, tgt = phi.source, phi.target
    if not is_degree_zero(phi):
        return {"reason": "phi is not of degree 0"}
    img = dict(phi.image(src.unit))
    acc(img, tgt.unit, Scalar.const(-1, tgt.ring))
    if not all(c.in_maximal_ideal() for c in img.values()):
        return {"reason": "phi(1) is not 1 modulo the maximal ideal"}
    lhs = map_compose(tgt.Delta, phi)
    rhs = map_compose(phi, src.Delta)
    return _map_witness(src, lhs, rhs, ("Delta''(phi)", "phi(Delta')"))


def is_tilde_morphism(phi: LinMap) -> bool:
    return tilde_morphism_witness(phi) is None


def diamond(f: LinMap, g: LinMap) -> ConvMap:
    """``f <> g = log(exp(f) o exp(g))``."""
    _same(g.target, f.source, "diamond: target(g) != source(f)")
    if not is_lin0(f) or not is_lin0(g):
        raise NotLin0("diamond needs Lin^0 arguments")
    return log_map(map_compose(exp_map(f), exp_map(g)))


def mv_unit(A: MVAlgebra) -> ConvMap:
    """``1_V = log(id)``."""
    return log_map(identity_map(A))


def oslash_algebras(A: MVAlgebra, B: MVAlgebra) -> TensorMVAlgebra:
    return TensorMVAlgebra(A, B)


def tensor_maps(F: LinMap, G: LinMap, source: TensorMVAlgebra, target: TensorMVAlgebra) -> ConvMap:
    """``F (x) G`` between tensor MV-algebras with the Koszul rule."""
    images = {}
    for (a, b) in source.basis:
        fa, gb = F.image(a), G.image(b)
        if not fa or not gb:
            continue
        da, db = F.source.degree(a), G.source.degree(b)
        out: dict = {}
        for y2, c2 in gb.items():
            s = _sign((G.target.degree(y2) - db) * da)
            for y1, c1 in fa.items():
                acc(out, (y1, y2), (c1 * c2).scale(s))
        if out:
            images[(a, b)] = out
    return _cm(source, target, images, None)


def oslash_morphisms(f: LinMap, g: LinMap, source: TensorMVAlgebra | None = None,
                     target: TensorMVAlgebra | None = None) -> ConvMap:
    """``f (/) g = log(exp(f) (x) exp(g))``."""
    source = source or TensorMVAlgebra(f.source, g.source)
    target = target or TensorMVAlgebra(f.target, g.target)
    return log_map(tensor_maps(exp_map(f), exp_map(g), source, target))


# ---------------------------------------------------------------- multiplicativity

def augmentation_square_span(A: MVAlgebra) -> list[dict]:
    """Rational vectors spanning ``I^2`` for ``I = Ker(eps)``."""
    proj = [_project_I(A, {x: Fraction(1)}) for x in A.basis if x != A.unit]
    eb = EchelonBasis()
    out = []
    for i, p in enumerate(proj):
        for q in proj[i:]:
            try:
                v = _rat_mul(A, p, q)
            except TruncationOverflow:
                continue
            if v and eb.add(v) is None:
                out.append(v)
    return out


def congruence_check_multiplicativity(f: LinMap, v1: Element, v2: Element, return_detail: bool = False):
    """Is ``exp(f)(v1 v2) - exp(f)(v1) exp(f)(v2)`` in ``(V'' (x) m, f(I'^2))``?

    Modulo ``m`` the scalars become rationals; the ideal generated by
    ``f(I'^2)`` is then spanned by the products ``z . f(w)`` with ``z`` a
    basis element of ``V''`` and ``w`` spanning ``I'^2``.  Products that
    leave the truncated space are left out, which can only make the test
    stricter.
    """
    src, tgt = f.source, f.target
    if tgt.ring.mode is Mode.LAURENT_AUX:
        raise ModeMismatch("multiplicativity congruence is not supported in LAURENT_AUX mode")
    if not is_bialgebra(src):
        raise NotBialgebra(f"{src!r} is not a bialgebra")
    if not is_lin0(f):
        raise NotLin0("f must be in Lin^0")
    E = exp_map(f)
    lhs = E(src.mul(v1, v2))
    rhs = tgt.mul(E(v1), E(v2))
    diff = {k: c.residue().constant() for k, c in (lhs - rhs).terms.items()}
    diff = {k: q for k, q in diff.items() if q}
    gens = []
    for w in augmentation_square_span(src):
        fw: dict = {}
        for x, q in w.items():
            for y, c in f.image(x).items():
                r = c.residue().constant() * q
                if r:
                    _rt_add(fw, y, r)
        if fw:
            gens.append(fw)
    eb = EchelonBasis()
    for fw in gens:
        for z in tgt.basis:
            try:
                v = _rat_mul(tgt, {z: Fraction(1)}, fw)
            except TruncationOverflow:
                continue
            if v:
                eb.add(v)
    ok = eb.contains(diff)
    if return_detail:
        return ok, {"difference_mod_m": {repr(k): str(q) for k, q in diff.items()}, "ideal_dim": eb.dim()}
    return ok

