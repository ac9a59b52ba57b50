"""Sparse exact linear algebra over the rationals.

Vectors are dicts mapping hashable coordinates to nonzero Fractions.  Only
what the ideal-membership and master-equation solvers need is provided:
an incremental echelon basis and a solver returning a particular solution
together with a kernel basis.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Mapping, Sequence

Vector = dict


def _axpy(y: dict, a: Fraction, x: Mapping) -> None:
    """In place ``y += a * x`` dropping zeros."""
    for k, v in x.items():
        w = y.get(k, 0) + a * v
        if w:
            y[k] = w
        else:
            y.pop(k, None)


class EchelonBasis:
    """Incrementally built echelon basis of a subspace.

    Every stored row has a pivot coordinate with coefficient 1 and all its
    other coordinates have a smaller rank than the pivot, so a greedy
    reduction from the highest-ranked coordinate down terminates.
    """

    def __init__(self, track: bool = False):
        self._rank: dict[Hashable, int] = {}
        self.rows: dict[Hashable, dict] = {}
        self.combos: dict[Hashable, dict] = {}
        self.track = track

    def _r(self, key) -> int:
        r = self._rank.get(key)
        if r is None:
            r = self._rank[key] = len(self._rank)
        return r

    def reduce(self, vec: Mapping, combo: dict | None = None) -> dict:
        v = {k: Fraction(c) for k, c in vec.items() if c}
        for k in v:
            self._r(k)
        while True:
            pivots = [k for k in v if k in self.rows]
            if not pivots:
                return v
            p = max(pivots, key=self._rank.__getitem__)
            a = v[p]
            _axpy(v, -a, self.rows[p])
            if combo is not None:
                _axpy(combo, a, self.combos[p])

    def add(self, vec: Mapping, label: Hashable | None = None) -> dict | None:
        """Add ``vec``; returns None if it was new, else its dependency combo.

        With tracking on, the returned dict expresses ``vec`` as a
        combination of previously added labels (a kernel relation).
        """
        combo: dict | None = {} if self.track else None
        v = self.reduce(vec, combo)
        if not v:
            return combo if combo is not None else {}
        p = max(v, key=self._rank.__getitem__)
        a = v[p]
        row = {k: c / a for k, c in v.items()}
        self.rows[p] = row
        if self.track:
            # row = (vec - sum combo) / a
            c = {label: Fraction(1)}
            _axpy(c, Fraction(-1), combo)
            self.combos[p] = {k: x / a for k, x in c.items()}
        return None

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)

    def dim(self) -> int:
        return len(self.rows)


def solve_linear(columns: Sequence[Mapping], rhs: Mapping):
    """Solve ``sum x_i columns[i] = rhs`` exactly.

    Returns ``(particular, kernel)`` where ``particular`` is a list of
    Fractions or None when the system is inconsistent, and ``kernel`` is a
    list of kernel basis vectors (lists of Fractions).
    """
    n = len(columns)
    eb = EchelonBasis(track=True)
    kernel: list[list[Fraction]] = []
    for i, col in enumerate(columns):
        dep = eb.add(col, label=i)
        if dep is not None:
            vec = [Fraction(0)] * n
            vec[i] = Fraction(1)
            for j, c in dep.items():
                vec[j] -= c
            kernel.append(vec)
    combo: dict = {}
    residual = eb.reduce(rhs, combo)
    if residual:
        return None, kernel
    part = [Fraction(0)] * n
    for j, c in combo.items():
        part[j] += c
    return part, kernel


def in_span(vectors: Sequence[Mapping], target: Mapping) -> bool:
    eb = EchelonBasis()
    for v in vectors:
        eb.add(v)
    return eb.contains(target)
