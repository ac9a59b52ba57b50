"""Component families, unshuffle graphs and the connected formula for ``f <> g``.

A degree-0 map between truncated symmetric algebras splits into pieces
``f^m_n : S^n(U') -> S^m(U'')``.  The composite ``f <> g`` can then be
assembled from connected bipartite graphs: lower vertices carry pieces of
``g``, upper vertices pieces of ``f`` and every letter of the middle word
is an edge.  :func:`compose_explicit` evaluates that sum and is tested
against the definitional ``log(exp f o exp g)``.

The module also carries the structure recognizers built on the
commutative product: differential-operator order, BV-infinity reports,
coderivations of ``S(U)`` and their L-infinity brackets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import factorial
from typing import Mapping, Sequence

from .errors import BlockSumMismatch, NotAnUnshuffle, NotSymmetricFlavor, TruncationOverflow
from .graded import (
    Element,
    LinMap,
    TensorSpace,
    acc,
    block_sign,
    compositions,
    is_unshuffle,
    map_compose,
    set_partitions,
    unshuffle_blocks,
)
from .mvcat import ConvMap, MVAlgebra, Report, SymmetricMVAlgebra, _cm, diamond
from .scalars import Mode, Scalar
from .symalg import SymmetricAlgebra, normalize


# ---------------------------------------------------------------- families

@dataclass
class ComponentFamily:
    """The table ``{(n, m): {x in S^n: {y in S^m: coeff}}}`` of a map."""

    source: SymmetricMVAlgebra
    target: SymmetricMVAlgebra
    table: dict

    def cell(self, n: int, m: int) -> dict:
        return self.table.get((n, m), {})

    def cell_map(self, n: int, m: int) -> LinMap:
        return LinMap._raw(self.source, self.target, {k: dict(v) for k, v in self.cell(n, m).items()}, None)

    def cells(self) -> list[tuple[int, int]]:
        return sorted(self.table)

    def images(self) -> dict:
        out: dict = {}
        for cell in self.table.values():
            for x, img in cell.items():
                d = out.setdefault(x, {})
                for y, c in img.items():
                    acc(d, y, c)
                if not d:
                    del out[x]
        return out

    def __eq__(self, other):
        if not isinstance(other, ComponentFamily):
            return NotImplemented
        return self.table == other.table

    def first_difference(self, other: "ComponentFamily"):
        for cell in sorted(set(self.table) | set(other.table)):
            if self.table.get(cell, {}) != other.table.get(cell, {}):
                return cell
        return None

    def to_json(self) -> list:
        out = []
        for n, m in self.cells():
            entries = []
            for x in self.source.basis:
                img = self.table[(n, m)].get(x)
                if img:
                    entries.append({
                        "in": self.source.key_to_json(x),
                        "out": Element._raw(self.target, dict(img)).to_json(),
                    })
            out.append({"n": n, "m": m, "map": entries})
        return out


def _require_symmetric(*algs) -> None:
    for A in algs:
        if not isinstance(A, SymmetricMVAlgebra):
            raise NotSymmetricFlavor(f"{A!r} is not a symmetric-flavor MV-algebra")


def components(f: LinMap) -> ComponentFamily:
    """Split a map between symmetric algebras into its ``(n, m)``-pieces."""
    _require_symmetric(f.source, f.target)
    table: dict = {}
    for x, img in f.images.items():
        n = len(x)
        for y, c in img.items():
            table.setdefault((n, len(y)), {}).setdefault(x, {})[y] = c
    return ComponentFamily(f.source, f.target, table)


def assemble(F: ComponentFamily) -> ConvMap:
    return _cm(F.source, F.target, F.images(), None)


def family_from_images(source, target, images: Mapping) -> ComponentFamily:
    return components(_cm(source, target, dict(images), None))


# ---------------------------------------------------------------- graphs

class _UF:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def count(self) -> int:
        return sum(1 for i in range(len(self.parent)) if self.find(i) == i)


@dataclass(frozen=True)
class ConnectivityGraph:
    """Bipartite multigraph of an unshuffle: one edge per letter."""

    k: int
    l: int
    edges: tuple[tuple[int, int], ...]
    components: int

    @property
    def V(self) -> int:
        return self.k + self.l

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def betti(self) -> int:
        return self.E - self.V + self.components

    @property
    def connected(self) -> bool:
        return self.components == 1


def _block_of(sizes: Sequence[int]) -> list[int]:
    out = []
    for b, a in enumerate(sizes):
        out.extend([b] * a)
    return out


def graph_from_blocks(j: Sequence[int], s: Sequence[int], blocks: Sequence[Sequence[int]]) -> ConnectivityGraph:
    """Graph of the unshuffle given by its upper blocks of letter positions."""
    lower = _block_of(j)
    k, l = len(j), len(s)
    edges = []
    uf = _UF(k + l)
    for b, blk in enumerate(blocks):
        for p in blk:
            a = lower[p]
            edges.append((a, b))
            uf.union(a, k + b)
    return ConnectivityGraph(k, l, tuple(edges), uf.count())


def connectivity(kappa: Sequence[int], j: Sequence[int], s: Sequence[int]) -> ConnectivityGraph:
    """Graph of ``kappa``: letter ``kappa[q]`` joins its lower block to the upper block of ``q``."""
    if sum(j) != sum(s):
        raise BlockSumMismatch(f"sum{tuple(j)} != sum{tuple(s)}")
    if not is_unshuffle(kappa, s):
        raise NotAnUnshuffle(f"{tuple(kappa)} is not an {tuple(s)}-unshuffle")
    upper = _block_of(s)
    blocks: list[list[int]] = [[] for _ in s]
    for q, p in enumerate(kappa):
        blocks[upper[q]].append(p)
    return graph_from_blocks(j, s, blocks)


def divisibility_exponent(i: Sequence[int], s: Sequence[int]) -> int:
    """``n + s_1 + ... + s_l - (kbar + lbar)`` with ``kbar``, ``lbar`` the nonzero block counts."""
    kbar = sum(1 for a in i if a)
    lbar = sum(1 for b in s if b)
    return sum(i) + sum(s) - kbar - lbar


# ---------------------------------------------------------------- Psi

def _tensor_keys(sym: SymmetricAlgebra, sizes: Sequence[int]):
    by_len: dict = {}
    for m in sym.basis:
        by_len.setdefault(len(m), []).append(m)
    return list(product(*(by_len.get(a, []) for a in sizes)))


def psi_on(sym: SymmetricAlgebra, words: Sequence[tuple], s: Sequence[int], c: int | None = None) -> dict:
    """``Psi`` (or its part of connectivity ``c``) on ``w_1 (x) ... (x) w_k``."""
    j = [len(w) for w in words]
    if sum(j) != sum(s):
        raise BlockSumMismatch(f"sum{tuple(j)} != sum{tuple(s)}")
    letters = [g for w in words for g in w]
    degs = [sym.gen_degrees[g] for g in letters]
    out: dict = {}
    for blocks in unshuffle_blocks(s):
        if c is not None and graph_from_blocks(j, s, blocks).components != c:
            continue
        sign = block_sign(blocks, degs)
        key = []
        for blk in blocks:
            bs, mono = normalize([letters[p] for p in blk], sym.gen_degrees)
            if mono is None:
                sign = 0
                break
            sign *= bs
            key.append(mono)
        if sign:
            k = tuple(key)
            v = out.get(k, 0) + sign
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def psi(sym: SymmetricAlgebra, j: Sequence[int], s: Sequence[int], c: int | None = None) -> LinMap:
    """``Psi^{s}_{j}`` as a map of tensor powers, summing over ``(s)``-unshuffles."""
    if sum(j) != sum(s):
        raise BlockSumMismatch(f"sum{tuple(j)} != sum{tuple(s)}")
    src = TensorSpace(*([sym] * len(j))) if j else TensorSpace(sym)
    tgt = TensorSpace(*([sym] * len(s))) if s else TensorSpace(sym)
    images = {}
    for words in _tensor_keys(sym, j):
        img = psi_on(sym, words, s, c)
        if img:
            images[words] = {k: Scalar.const(q, sym.ring) for k, q in img.items()}
    return LinMap._raw(src, tgt, images, 0)


def psi_by_connectivity(sym: SymmetricAlgebra, j: Sequence[int], s: Sequence[int], c: int) -> LinMap:
    return psi(sym, j, s, c)


# ---------------------------------------------------------------- compose_explicit

def _mul_into(tgt: SymmetricMVAlgebra, x: dict, y: dict) -> dict:
    out: dict = {}
    for a, ca in x.items():
        for b, cb in y.items():
            c = ca * cb
            if not c.terms:
                continue
            for m, q in tgt.mul_keys(a, b):
                acc(out, m, c.scale(q))
    return out


class _Composer:
    def __init__(self, f_im: dict, g_im: dict, src, mid, tgt, reduced: bool):
        self.f, self.g = f_im, g_im
        self.src, self.mid, self.tgt = src, mid, tgt
        self.reduced = reduced
        self.ring = src.ring
        self.N = self.ring.nilpotency_index()
        self.udeg = mid.U.degrees
        self._upper: dict = {}
        self.one = {tgt.unit: Scalar.one(self.ring)}

    # word checks shared by both modes
    def _word_ok(self, word) -> bool:
        seen = set()
        for gen, _ in word:
            if self.udeg[gen] & 1:
                if gen in seen:
                    return False
                seen.add(gen)
        if len(word) > self.mid.D:
            raise TruncationOverflow(
                f"middle word of length {len(word)} exceeds D={self.mid.D}; raise D of the middle algebra"
            )
        return True

    def _upper_value(self, word, blocks) -> dict | None:
        degs = [self.udeg[g] for g, _ in word]
        sign = block_sign(blocks, degs) if blocks else 1
        val = self.one
        for blk in blocks:
            if blk:
                bs, mono = normalize([word[p][0] for p in blk], self.udeg)
                if mono is None:
                    return None
                sign *= bs
            else:
                mono = ()
            fC = self.f.get(mono)
            if not fC:
                return None
            val = _mul_into(self.tgt, val, fC)
            if not val:
                return None
        if sign < 0:
            val = {k: -c for k, c in val.items()}
        return val

    def upper_reduced(self, word) -> dict:
        """Connected upper sum over unordered set partitions of the letters."""
        hit = self._upper.get(word)
        if hit is not None:
            return hit
        labels = [a for _, a in word]
        nlow = max(labels) + 1
        res: dict = {}
        for rho in set_partitions(range(len(word))):
            uf = _UF(nlow + len(rho))
            for b, blk in enumerate(rho):
                for p in blk:
                    uf.union(labels[p], nlow + b)
            if uf.count() != 1:
                continue
            val = self._upper_value(word, rho)
            if val:
                for y, c in val.items():
                    acc(res, y, c)
        self._upper[word] = res
        return res

    def upper_naive(self, word, k: int) -> dict:
        """Connected upper sum over ordered block patterns with weight ``1/l!``."""
        key = (word, k)
        hit = self._upper.get(key)
        if hit is not None:
            return hit
        labels = [a for _, a in word]
        E = len(word)
        res: dict = {}
        for l in range(0, max(E, 1) + 1):
            w = Fraction(1, factorial(l))
            for s in compositions(E, l):
                for blocks in unshuffle_blocks(s):
                    uf = _UF(k + l)
                    for b, blk in enumerate(blocks):
                        for p in blk:
                            uf.union(labels[p], k + b)
                    if k + l == 0 or uf.count() != 1:
                        continue
                    if l == 0:
                        val = self.one
                    else:
                        val = self._upper_value(word, blocks)
                    if val:
                        for y, c in val.items():
                            acc(res, y, c.scale(w))
        self._upper[key] = res
        return res

    def _lower_terms(self, vertices):
        """Products of one term from each lower vertex: (words, coefficient)."""
        ring = self.ring
        items = [list(v.items()) for v in vertices]
        for choice in product(*items):
            c = Scalar.one(ring)
            for _, ci in choice:
                c = c * ci
                if not c.terms:
                    break
            if not c.terms:
                continue
            yield tuple(w for w, _ in choice), c

    def value_reduced(self, x: tuple) -> dict:
        n = len(x)
        degs = [self.src.U.degrees[g] for g in x]
        res: dict = {}
        if n == 0:
            for y, c in self.f.get((), {}).items():
                acc(res, y, c)
        g1 = self.g.get((), {})
        for pi in set_partitions(range(n)):
            sign = block_sign(pi, degs) if pi else 1
            verts = []
            for B in pi:
                gB = self.g.get(tuple(x[p] for p in B))
                if not gB:
                    break
                verts.append(gB)
            else:
                for k0 in range(self.N):
                    if not pi and k0 == 0:
                        continue
                    if k0 and not g1:
                        break
                    allv = verts + [g1] * k0
                    weight = Fraction(sign, factorial(k0))
                    self._accumulate(res, allv, weight, reduced=True)
        return res

    def value_naive(self, x: tuple) -> dict:
        n = len(x)
        degs = [self.src.U.degrees[g] for g in x]
        res: dict = {}
        g1 = self.g.get((), {})
        for k in range(0, n + self.N):
            w = Fraction(1, factorial(k))
            for i in compositions(n, k):
                for blocks in unshuffle_blocks(i):
                    sign = block_sign(blocks, degs) if blocks else 1
                    verts = []
                    for B in blocks:
                        gB = self.g.get(tuple(x[p] for p in B)) if B else g1
                        if not gB:
                            break
                        verts.append(gB)
                    else:
                        self._accumulate(res, verts, w * sign, reduced=False)
        return res

    def _accumulate(self, res: dict, verts, weight: Fraction, reduced: bool) -> None:
        k = len(verts)
        for words, c in self._lower_terms(verts):
            c = c.scale(weight)
            if not c.terms:
                continue
            word = tuple((gen, a) for a, w in enumerate(words) for gen in w)
            if reduced:
                if k == 1 and not words[0]:
                    acc(res, self.tgt.unit, c)
                    continue
                if any(not w for w in words):
                    continue
                if not self._word_ok(word):
                    continue
                up = self.upper_reduced(word)
            else:
                if not self._word_ok(word):
                    continue
                up = self.upper_naive(word, k)
            for y, d in up.items():
                acc(res, y, c * d)


def compose_explicit(f: ComponentFamily, g: ComponentFamily, reduced: bool = True) -> ComponentFamily:
    """``(f <> g)^m_n`` from connected graphs only.

    With ``reduced=False`` the sum runs over ordered block patterns
    ``(i_1..i_k)``, ``(s_1..s_l)`` (empty blocks allowed) with weight
    ``1/(k! l!)``.  The default groups those terms by their unordered
    block partitions, which leaves weight ``1/k0!`` for ``k0`` insertions
    of ``g(1)`` and removes every disconnected upper pattern up front.
    """
    _require_symmetric(g.source, g.target, f.source, f.target)
    if not (g.target is f.source or g.target.same_space(f.source)):
        from .errors import BasisMismatch
        raise BasisMismatch("compose_explicit: target(g) != source(f)")
    comp = _Composer(f.images(), g.images(), g.source, f.source, f.target, reduced)
    images = {}
    for x in g.source.basis:
        v = comp.value_reduced(x) if reduced else comp.value_naive(x)
        if v:
            images[x] = v
    return family_from_images(g.source, f.target, images)


def compose_definitional(f: ComponentFamily, g: ComponentFamily) -> ComponentFamily:
    return components(diamond(assemble(f), assemble(g)))


# ---------------------------------------------------------------- family predicates

def _hbar_orders(cell: Mapping):
    for img in cell.values():
        for c in img.values():
            for (i, _j) in c.terms:
                yield i


def ibl_witness(F: ComponentFamily):
    for (n, m), cell in sorted(F.table.items()):
        need = n - 1 if n >= 1 else 1
        for x, img in cell.items():
            for y, c in img.items():
                for (i, _j) in c.terms:
                    if i < need:
                        return {"n": n, "m": m, "in": F.source.key_to_json(x), "out": F.target.key_to_json(y),
                                "hbar_exponent": i, "required": need}
    return None


def is_ibl_family(F: ComponentFamily) -> bool:
    """``f^m_n`` divisible by ``hbar^{n-1}`` for ``n >= 1`` and no ``hbar^0`` part in ``f(1)``."""
    if F.source.ring.mode is Mode.K:
        raise ValueError("IBL check needs an hbar mode")
    return ibl_witness(F) is None


def munster_sachs_witness(F: ComponentFamily):
    for (n, m), cell in sorted(F.table.items()):
        for x, img in cell.items():
            for y, c in img.items():
                for (i, _j) in c.terms:
                    if m > i + 1:
                        return {"n": n, "m": m, "in": F.source.key_to_json(x), "out": F.target.key_to_json(y),
                                "hbar_exponent": i}
    return None


def is_munster_sachs_family(F: ComponentFamily) -> bool:
    """The ``hbar^{k-1}`` part of every ``f^m_n`` vanishes for ``m > k``."""
    if F.source.ring.mode is Mode.K:
        raise ValueError("this check needs an hbar mode")
    return munster_sachs_witness(F) is None


# ---------------------------------------------------------------- operators

def _mul_elem(A: MVAlgebra, x: dict, y: dict) -> dict:
    out: dict = {}
    for a, ca in x.items():
        for b, cb in y.items():
            c = ca * cb
            if not c.terms:
                continue
            for m, q in A.mul_keys(a, b):
                acc(out, m, c.scale(q))
    return out


def _apply(images: Mapping, v: Mapping) -> dict:
    out: dict = {}
    for x, c in v.items():
        for y, d in images.get(x, {}).items():
            acc(out, y, c * d)
    return out


def _sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        acc(out, k, -c)
    return out


def _nested_commutator(A: MVAlgebra, op: LinMap, op_degree: int, parts: Sequence[tuple[int, dict]], v: dict) -> dict:
    """``[[..[op, L_{a_1}], ..], L_{a_k}](v)`` for homogeneous ``a_i``."""
    if not parts:
        return _apply(op.images, v)
    *head, (da, a) = parts
    dT = op_degree + sum(d for d, _ in head)
    first = _nested_commutator(A, op, op_degree, head, _mul_elem(A, a, v))
    second = _mul_elem(A, a, _nested_commutator(A, op, op_degree, head, v))
    if (dT * da) & 1:
        second = {k: -c for k, c in second.items()}
    return _sub(first, second)


def _homogeneous(A: MVAlgebra, x: Element) -> list[tuple[int, dict]]:
    return [(d, e.terms) for d, e in x.homogeneous_parts().items()]


def phi_n(A: MVAlgebra, a: Sequence[Element], Delta: LinMap | None = None, phi0: str = "zero",
          op_degree: int = 1) -> Element:
    """``Phi_n(a_1..a_n) = [[..[Delta, L_{a_1}], ..], L_{a_n}](1)``.

    Inhomogeneous arguments are expanded multilinearly over their
    homogeneous parts.  For ``n = 0`` the flag ``phi0`` selects between the
    convention ``Phi_0 = 0`` (``"zero"``) and ``Phi_0 = Delta(1)``
    (``"apply"``).
    """
    Delta = A.Delta if Delta is None else Delta
    one = {A.unit: Scalar.one(A.ring)}
    if not a:
        if phi0 == "zero":
            return Element.zero(A)
        if phi0 == "apply":
            return Element._raw(A, _apply(Delta.images, one))
        raise ValueError(f"unknown phi0 convention {phi0!r}")
    out: dict = {}
    for parts in product(*(_homogeneous(A, x) for x in a)):
        for k, c in _nested_commutator(A, Delta, op_degree, list(parts), one).items():
            acc(out, k, c)
    return Element._raw(A, out)


def default_probes(A: MVAlgebra) -> list:
    if isinstance(A, SymmetricMVAlgebra):
        return [m for m in A.basis if len(m) == 1]
    return [x for x in A.basis if x != A.unit]


def operator_order_witness(A: MVAlgebra, op: LinMap, k: int, probes: Sequence | None = None,
                           op_degree: int | None = None):
    """None if all ``(k+1)``-fold commutators of ``op`` with probes vanish on every basis key."""
    if op_degree is None:
        ds = op.term_degrees()
        op_degree = next(iter(ds)) if len(ds) == 1 else 1
    probes = default_probes(A) if probes is None else list(probes)
    one = Scalar.one(A.ring)
    for combo in combinations_with_replacement(probes, k + 1):
        parts = [(A.degree(p), {p: one}) for p in combo]
        for v in A.basis:
            try:
                r = _nested_commutator(A, op, op_degree, parts, {v: one})
            except TruncationOverflow:
                continue
            if r:
                return {"probes": [A.key_to_json(p) for p in combo], "on": A.key_to_json(v),
                        "value": Element._raw(A, r).to_json()}
    return None


def operator_order(A: MVAlgebra, op: LinMap, k: int, probes: Sequence | None = None) -> bool:
    """Is ``op`` a differential operator of order ``<= k``?

    For ``S(U)`` the generators suffice as probes, because commutators with
    ``L_{ab}`` expand into commutators with ``L_a`` and ``L_b``.  Probe
    products that leave the truncated space are skipped.
    """
    return operator_order_witness(A, op, k, probes) is None


def hbar_split(A: MVAlgebra, op: LinMap | None = None) -> dict[int, LinMap]:
    """``Delta = sum_k hbar^{k-1} Delta_k``: returns ``{k: Delta_k}``."""
    op = A.Delta if op is None else op
    parts: dict = {}
    for x, img in op.images.items():
        for y, c in img.items():
            for (i, j), q in c.terms.items():
                d = parts.setdefault(i + 1, {}).setdefault(x, {})
                acc(d, y, Scalar({(0, j): q}, A.ring))
    return {k: LinMap._raw(A, A, im, None) for k, im in sorted(parts.items())}


def is_bv_infinity(A: MVAlgebra) -> Report:
    from .mvcat import validate_mv
    rep = Report()
    base = validate_mv(A)
    for name in ("mu_commutative", "Delta_square_zero", "Delta_unit", "Delta_degree"):
        c = base.get(name)
        rep.add(name, c.passed, c.witness)
    split = hbar_split(A)
    neg = [k for k in split if k < 1]
    rep.add("no_negative_hbar_powers", not neg, {"powers": [k - 1 for k in neg]} if neg else None)
    for k, op in split.items():
        if k < 1:
            continue
        w = operator_order_witness(A, op, k)
        rep.add(f"order_Delta_{k}<={k}", w is None, w)
    return rep


def coderivation_witness(A: MVAlgebra, op: LinMap | None = None):
    op = A.Delta if op is None else op
    for x in A.basis:
        lhs: dict = {}
        for y, c in op.image(x).items():
            for k, q in A.comul_key(y):
                acc(lhs, k, c.scale(q))
        rhs: dict = {}
        for (a, b), q in A.comul_key(x):
            for a2, c in op.image(a).items():
                acc(rhs, (a2, b), c.scale(q))
            s = -1 if A.degree(a) & 1 else 1
            for b2, c in op.image(b).items():
                acc(rhs, (a, b2), c.scale(q * s))
        if lhs != rhs:
            return {"in": A.key_to_json(x)}
    return None


def is_coderivation(A: MVAlgebra, op: LinMap | None = None) -> bool:
    """``delta Delta = (Delta (x) id + id (x) Delta) delta`` on every basis key."""
    return coderivation_witness(A, op) is None


@dataclass
class LInftyData:
    brackets: dict
    square_zero: bool

    def bracket(self, n: int) -> dict:
        return self.brackets.get(n, {})


def l_infty_brackets(A: SymmetricMVAlgebra, op: LinMap | None = None) -> LInftyData:
    """``l_n = pi_1 o Delta`` restricted to ``S^n(U)``."""
    _require_symmetric(A)
    op = A.Delta if op is None else op
    br: dict = {}
    for x, img in op.images.items():
        for y, c in img.items():
            if len(y) == 1:
                br.setdefault(len(x), {}).setdefault(x, {})[y] = c
    sq = map_compose(op, op)
    return LInftyData(br, not sq.images)


def coderivation_from_brackets(A: SymmetricMVAlgebra, brackets: Mapping[int, Mapping]) -> LinMap:
    """The coderivation of ``S(U)`` whose corestriction is ``{l_n}``.

    ``Delta(u_1..u_n) = sum over (p, n-p)-unshuffles of +- l_p(u..) . u..``.
    """
    _require_symmetric(A)
    ring = A.ring
    degs = A.U.degrees
    images = {}
    for x in A.basis:
        n = len(x)
        out: dict = {}
        xd = [degs[g] for g in x]
        for p in range(1, n + 1):
            lp = brackets.get(p)
            if not lp:
                continue
            for blocks in unshuffle_blocks((p, n - p)):
                first = tuple(x[i] for i in blocks[0])
                img = lp.get(first)
                if not img:
                    continue
                s = block_sign(blocks, xd)
                rest = tuple(x[i] for i in blocks[1])
                for y, c in img.items():
                    for m, q in A.mul_keys(y, rest):
                        acc(out, m, c.scale(s * q))
        if out:
            images[x] = out
    return LinMap._raw(A, A, images, None)


def linf_relation(A: SymmetricMVAlgebra, brackets: Mapping[int, Mapping], n: int) -> dict:
    """``sum l_{n-p+1}(l_p(u_sigma..) . u_sigma..)`` on every monomial of ``S^n(U)``.

    The L-infinity relations state that all of these vanish.
    """
    degs = A.U.degrees
    res = {}
    for x in A.basis:
        if len(x) != n:
            continue
        xd = [degs[g] for g in x]
        out: dict = {}
        for p in range(1, n + 1):
            lp = brackets.get(p)
            lq = brackets.get(n - p + 1)
            if not lp or not lq:
                continue
            for blocks in unshuffle_blocks((p, n - p)):
                img = lp.get(tuple(x[i] for i in blocks[0]))
                if not img:
                    continue
                s = block_sign(blocks, xd)
                rest = tuple(x[i] for i in blocks[1])
                for y, c in img.items():
                    for m, q in A.mul_keys(y, rest):
                        for z, d in lq.get(m, {}).items():
                            acc(out, z, (c * d).scale(s * q))
        if out:
            res[x] = out
    return res
