"""The quantum master equation ``Delta e^S = 0`` and its uses.

Solutions correspond to MV-morphisms out of the ground algebra ``k``.  In
the Laurent setting ``S = S~/hbar`` the equation becomes a Maurer-Cartan
equation for the higher derived brackets ``l_n = hbar^{1-n} Phi_n``.
Solutions are moved along MV-morphisms by the push-forward
``f_!(S) = log(exp(f)(e^S))``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .composed import phi_n
from .errors import (
    AxiomViolation,
    ModeMismatch,
    NotAMorphism,
    NotASolution,
    NotBialgebra,
    NotDegreeZero,
    NotInMaximalIdeal,
    NotLin0,
    NotPrimitive,
    SchemaError,
)
from .graded import Element, LinMap, acc
from .linalg import solve_linear
from .mvcat import (
    ConvMap,
    MVAlgebra,
    SymmetricMVAlgebra,
    _cm,
    diamond,
    exp_map,
    ground_algebra,
    is_bialgebra,
    is_lin0,
    mv_morphism_witness,
    validate_mv,
)
from .scalars import Mode, Scalar


@dataclass(frozen=True)
class MasterCandidate:
    """A degree-0 element ``S`` with coefficients in the maximal ideal.

    With ``laurent_form`` the stored element is ``S~`` and ``S = S~/hbar``;
    this needs LAURENT_AUX scalars, where the maximal ideal is ``(lambda)``.
    """

    element: Element
    laurent_form: bool = False

    def __post_init__(self):
        el = self.element
        bad = [k for k in el.terms if el.space.degree(k) != 0]
        if bad:
            raise NotDegreeZero(f"term {el.space.key_to_json(bad[0])!r} has nonzero degree")
        if self.laurent_form and el.ring.mode is not Mode.LAURENT_AUX:
            raise ModeMismatch("laurent_form needs LAURENT_AUX scalars")
        for k, c in el.terms.items():
            if not c.in_maximal_ideal():
                raise NotInMaximalIdeal(f"coefficient of {el.space.key_to_json(k)!r} is {c!r}")

    @property
    def algebra(self) -> MVAlgebra:
        return self.element.space

    @property
    def S(self) -> Element:
        """The element entering ``e^S``."""
        if self.laurent_form:
            return self.element.map_coeffs(lambda c: c.hbar_shift(-1))
        return self.element

    @property
    def tilde(self) -> Element:
        """``S~ = hbar S``; only defined in laurent_form."""
        if not self.laurent_form:
            raise ModeMismatch("candidate is not in laurent_form")
        return self.element

    def to_json(self) -> dict:
        return {"element": self.element.to_json(), "laurent_form": self.laurent_form}

    @classmethod
    def from_json(cls, algebra: MVAlgebra, data) -> "MasterCandidate":
        if not isinstance(data, dict) or "element" not in data:
            raise SchemaError("master candidate needs an 'element' field")
        return cls(Element.from_json(algebra, data["element"]), bool(data.get("laurent_form", False)))


def _candidate(S, A: MVAlgebra | None = None) -> MasterCandidate:
    if isinstance(S, Element):
        S = MasterCandidate(S)
    if A is not None and not (S.algebra is A or S.algebra.same_space(A)):
        raise ModeMismatch("candidate lives in a different algebra")
    return S


def algebra_exp(S: MasterCandidate | Element) -> Element:
    """``e^S = sum S^k / k!`` in the algebra of ``S``."""
    S = _candidate(S)
    return S.algebra.alg_exp(S.S)


def qme_witness(S: MasterCandidate | Element, A: MVAlgebra | None = None):
    """None when ``Delta e^S = 0``, else the first offending monomial."""
    S = _candidate(S, A)
    A = S.algebra
    r = A.Delta(algebra_exp(S))
    if not r.terms:
        return None
    k, c = min(r.terms.items(), key=lambda kc: repr(A.key_to_json(kc[0])))
    return {"monomial": A.key_to_json(k), "coefficient": c.to_json()}


def is_qme_solution(S: MasterCandidate | Element, A: MVAlgebra | None = None) -> bool:
    return qme_witness(S, A) is None


def qme_report(S: MasterCandidate | Element, A: MVAlgebra | None = None) -> dict:
    w = qme_witness(S, A)
    return {"check": "Delta(e^S) = 0", "pass": w is None, "witness": w}


# ---------------------------------------------------------------- solutions and morphisms

def solution_to_morphism(S: MasterCandidate | Element, A: MVAlgebra | None = None) -> ConvMap:
    """The MV-morphism ``s: k -> V`` with ``s(1) = S``."""
    S = _candidate(S, A)
    A = S.algebra
    w = qme_witness(S)
    if w is not None:
        raise NotASolution(f"Delta e^S != 0 at {w['monomial']!r}")
    k = ground_algebra(A.ring)
    s = _cm(k, A, {0: dict(S.S.terms)} if S.S.terms else {}, 0)
    # exp(s)(1) = e^{s(1)} because 1 in k is group-like
    E1 = exp_map(s)(k.one())
    if E1 != algebra_exp(S):
        raise AxiomViolation("exp(s)(1) = e^S", {"exp(s)(1)": E1.to_json()})
    return s


def morphism_to_solution(s: LinMap, laurent_form: bool = False) -> MasterCandidate:
    """``S = s(1)`` for an MV-morphism ``s: k -> V``."""
    k = s.source
    if len(k.basis) != 1 or k.Delta.images or k.degree(k.unit) != 0:
        raise NotAMorphism("source is not the ground algebra k")
    w = mv_morphism_witness(s)
    if w is not None:
        raise NotAMorphism(f"s is not an MV-morphism: {w}")
    S = s(k.one())
    if laurent_form:
        S = S.map_coeffs(lambda c: c.hbar_shift(1))
    return MasterCandidate(S, laurent_form)


def at_most_simple_pole(x: Element) -> bool:
    """Does every coefficient of ``x`` have ``hbar``-order at least ``-1``?"""
    return all(i >= -1 for c in x.terms.values() for i, _ in c.terms)


# ---------------------------------------------------------------- derived brackets

def _require_laurent(A: MVAlgebra) -> None:
    if A.ring.mode is not Mode.LAURENT_AUX:
        raise ModeMismatch("derived brackets need LAURENT_AUX scalars")


def _require_commutative(A: MVAlgebra) -> None:
    if isinstance(A, SymmetricMVAlgebra):
        return
    c = validate_mv(A).get("mu_commutative")
    if not c.passed:
        raise AxiomViolation("mu_commutative", c.witness)


def higher_derived_bracket(A: MVAlgebra, n: int, args: Sequence[Element], Delta: LinMap | None = None) -> Element:
    """``l_n(a_1..a_n) = hbar^{-(n-1)} Phi_n(a_1..a_n)``, divided exactly."""
    if n < 2:
        raise ValueError("derived brackets start at n = 2")
    if len(args) != n:
        raise ValueError(f"l_{n} takes {n} arguments, got {len(args)}")
    _require_laurent(A)
    return phi_n(A, args, Delta).map_coeffs(lambda c: c.hbar_shift(1 - n))


def reliable_hbar_order(A: MVAlgebra) -> int:
    """``hbar``-orders below this bound are unaffected by truncation.

    Dropping ``hbar^{>=H}`` is not an ideal once ``hbar^{-1}`` is
    available.  In the bracket identity every negative power comes with a
    factor of ``lambda``, so a dropped term can reappear at most ``L - 1``
    orders lower.
    """
    return A.ring.H - A.ring.L + 1


def below_order(x: Element, order: int) -> Element:
    return x.map_coeffs(lambda c: Scalar._raw({k: v for k, v in c.terms.items() if k[0] < order}, c.ring))


def derived_bracket_identity(A: MVAlgebra, S_tilde: Element) -> tuple[Element, Element]:
    """Both sides of ``hbar e^{-S~/hbar} Delta(e^{S~/hbar}) = sum_n l_n(S~..)/n!``.

    Each side is cut to the orders below :func:`reliable_hbar_order`.
    """
    _check_tilde(A, S_tilde)
    X = S_tilde.map_coeffs(lambda c: c.hbar_shift(-1))
    lhs = A.mul(A.alg_exp(-X), A.Delta(A.alg_exp(X))).map_coeffs(lambda c: c.hbar_shift(1))
    cut = reliable_hbar_order(A)
    return below_order(lhs, cut), below_order(_mc_sum(A, S_tilde), cut)


def _check_tilde(A: MVAlgebra, S_tilde: Element) -> None:
    _require_laurent(A)
    _require_commutative(A)
    if A.Delta(A.one()).terms:
        raise AxiomViolation("Delta_unit", {"Delta(1)": A.Delta(A.one()).to_json()})
    MasterCandidate(S_tilde, laurent_form=True)


def _mc_sum(A: MVAlgebra, S_tilde: Element) -> Element:
    out = A.Delta(S_tilde)
    # each insertion of S~ carries lambda, so n < L suffices
    for n in range(2, A.ring.L):
        l = higher_derived_bracket(A, n, [S_tilde] * n)
        out = out + l.scale(Fraction(1, factorial(n)))
    return out


def mc_residual(A: MVAlgebra, S_tilde: Element, verify: bool = True) -> Element:
    """``Delta S~ + sum_{n>=2} l_n(S~,..,S~)/n!``.

    With ``verify`` the result is compared against
    ``hbar e^{-S~/hbar} Delta(e^{S~/hbar})`` on the reliable orders.
    """
    _check_tilde(A, S_tilde)
    out = _mc_sum(A, S_tilde)
    if verify:
        lhs, rhs = derived_bracket_identity(A, S_tilde)
        if lhs != rhs:
            raise AxiomViolation("derived bracket identity", {"lhs": lhs.to_json(), "rhs": rhs.to_json()})
    return out


# ---------------------------------------------------------------- push-forward

def _push(f: LinMap, S: Element) -> Element:
    E = exp_map(f)
    return f.target.alg_log(E(f.source.alg_exp(S)))


def pushforward(f: LinMap, S: MasterCandidate | Element) -> MasterCandidate:
    """``f_!(S) = log(exp(f)(e^S))``, a solution in the target."""
    S = _candidate(S, f.source)
    w = mv_morphism_witness(f)
    if w is not None:
        raise NotAMorphism(f"f is not an MV-morphism: {w}")
    w = qme_witness(S)
    if w is not None:
        raise NotASolution(f"Delta e^S != 0 at {w['monomial']!r}")
    return MasterCandidate(_push(f, S.S))


def pushforward_via_diamond(f: LinMap, S: MasterCandidate | Element) -> MasterCandidate:
    """The same push-forward computed as ``(f <> s)(1)``."""
    s = solution_to_morphism(S, f.source)
    return morphism_to_solution(diamond(f, s))


def is_primitive(A: MVAlgebra, x: Element) -> bool:
    """``delta(x) = x (x) 1 + 1 (x) x``."""
    d = A.comul(x)
    u = A.unit
    for k, c in x.terms.items():
        acc(d, (k, u), -c)
        acc(d, (u, k), -c)
    return not d


def transfer_sides(f: LinMap, S: MasterCandidate | Element) -> tuple[Element, Element]:
    """``(f_!(S), f(e^S))`` after enforcing the bialgebra and primitivity hypotheses."""
    S = _candidate(S, f.source)
    A = f.source
    if not is_lin0(f):
        raise NotLin0("f must be in Lin^0")
    if not is_bialgebra(A):
        raise NotBialgebra(f"{A!r} is not a bialgebra")
    if not is_primitive(A, S.S):
        raise NotPrimitive("S is not primitive")
    return _push(f, S.S), f(algebra_exp(S))


def transfer_check(f: LinMap, S: MasterCandidate | Element) -> bool:
    lhs, rhs = transfer_sides(f, S)
    return lhs == rhs


# ---------------------------------------------------------------- solving

def _rational_part(x: Element, j: int) -> dict:
    return {(k, i): q for k, c in x.terms.items() for (i, jj), q in c.terms.items() if jj == j}


def solve_qme_by_order(A: MVAlgebra, rng: random.Random | None = None, kernel_density: float = 0.6,
                       hbar_range: Sequence[int] | None = None) -> MasterCandidate | None:
    """A solution ``S`` with coefficients in ``(lambda)``, built order by order.

    The ``lambda^j`` part of ``Delta e^S`` is ``Delta(S_j)`` plus a term
    depending only on ``S_1 .. S_{j-1}``, so each order is an exact linear
    system for ``S_j``.  A particular solution is taken and a random kernel
    combination added.  Returns None when some order is obstructed.
    """
    ring = A.ring
    if not ring.has_aux:
        raise ModeMismatch("order-by-order solving needs the auxiliary parameter lambda")
    rng = rng or random.Random(0)
    if hbar_range is None:
        lo = -ring.P if ring.mode is Mode.LAURENT_AUX else 0
        hbar_range = range(lo, ring.H if ring.has_hbar else 1)
    keys = [x for x in A.basis if A.degree(x) == 0]
    S = A.zero()
    for j in range(1, ring.L):
        unknowns = [(x, i) for x in keys for i in hbar_range]
        cols = [_rational_part(A.Delta(Element(A, {x: Scalar.monomial(1, i, j, ring)})), j) for x, i in unknowns]
        rhs = {k: -q for k, q in _rational_part(A.Delta(A.alg_exp(S)), j).items()}
        part, kernel = solve_linear(cols, rhs)
        if part is None:
            return None
        vec = list(part)
        for kv in kernel:
            if rng.random() < kernel_density:
                c = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
                vec = [a + c * b for a, b in zip(vec, kv)]
        terms: dict = {}
        for (x, i), q in zip(unknowns, vec):
            if q:
                acc(terms, x, Scalar.monomial(q, i, j, ring))
        S = S + Element._raw(A, terms)
    return MasterCandidate(S)


def solution_set(A: MVAlgebra, count: int, seed: int = 0) -> list[MasterCandidate]:
    """``count`` solutions from independent random kernel choices, zero included."""
    rng = random.Random(seed)
    out = [MasterCandidate(A.zero())]
    tries = 0
    while len(out) < count and tries < 4 * count:
        tries += 1
        S = solve_qme_by_order(A, rng)
        if S is not None:
            out.append(S)
    return out
