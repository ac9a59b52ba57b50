"""JSON documents for algebras, maps, families and master candidates.

An algebra document looks like::

    {"mode": "hbar", "trunc": {"D": 4, "H": 2, "L": 1, "P": 0},
     "flavor": "symmetric", "generators": [{"name": "x", "degree": 0}],
     "Delta": [{"in": ["x", "x"], "out": [...]}]}

Flavor ``explicit`` adds ``unit``, ``mu``, ``delta`` and ``eps`` tables of
rational structure constants; flavor ``supertrivial`` needs only ``unit``
and ``eps``.  Documents that refer to algebras may inline them or give a
path relative to the referring file.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .composed import family_from_images
from .errors import SchemaError
from .graded import Element, GradedBasis, LinMap
from .mvcat import (
    ConvMap,
    ExplicitMVAlgebra,
    MVAlgebra,
    SymmetricMVAlgebra,
    make_supertrivial,
)
from .qme import MasterCandidate
from .scalars import Mode, RingMode, Scalar
from .symalg import SymmetricAlgebra

TRUNC_KEYS = ("D", "H", "L", "P")


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _get(data: Mapping, key: str, kind=None):
    if not isinstance(data, Mapping) or key not in data:
        raise SchemaError(f"missing field {key!r}")
    v = data[key]
    if kind is not None and not isinstance(v, kind):
        raise SchemaError(f"field {key!r} has the wrong type")
    return v


# ---------------------------------------------------------------- rings

def ring_from_json(mode: str, trunc: Mapping, overrides: Mapping | None = None,
                   mode_override: str | None = None) -> tuple[RingMode, int | None]:
    """Build ``(ring, D)`` from a document's mode and trunc, applying overrides.

    Overrides may only enlarge the declared truncation.  Changing the mode
    resets the orders the new mode does not use.
    """
    try:
        m = Mode(mode)
    except ValueError:
        raise SchemaError(f"unknown mode {mode!r}") from None
    vals = {"H": 1, "L": 1, "P": 0, "D": None}
    for k in TRUNC_KEYS:
        if k in trunc:
            if not isinstance(trunc[k], int):
                raise SchemaError(f"trunc.{k} must be an integer")
            vals[k] = trunc[k]
    for k, v in (overrides or {}).items():
        old = vals.get(k)
        if old is not None and v < old:
            raise SchemaError(f"override {k}={v} is smaller than the declared {k}={old}")
        vals[k] = v
    if mode_override is not None:
        try:
            m = Mode(mode_override)
        except ValueError:
            raise SchemaError(f"unknown mode {mode_override!r}") from None
        if m is Mode.K:
            vals.update(H=1, L=1, P=0)
        elif m is Mode.HBAR:
            vals.update(L=1, P=0)
        elif m is Mode.HBAR_AUX:
            vals.update(P=0)
    try:
        ring = RingMode(m, vals["H"], vals["L"], vals["P"])
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    return ring, vals["D"]


def ring_to_json(ring: RingMode, D: int | None = None) -> tuple[str, dict]:
    trunc = {"H": ring.H, "L": ring.L, "P": ring.P}
    if D is not None:
        trunc["D"] = D
    return ring.mode.value, trunc


# ---------------------------------------------------------------- algebras

def _rational(data, ring: RingMode, what: str) -> Fraction:
    c = Scalar.from_json(data, ring)
    if any(k != (0, 0) for k in c.terms):
        raise SchemaError(f"{what} must be rational")
    return c.constant()


def _images_from_json(source, target, data) -> dict:
    if not isinstance(data, list):
        raise SchemaError("map must be a list of {'in', 'out'} entries")
    images: dict = {}
    for t in data:
        key = source.key_from_json(_get(t, "in"))
        el = Element.from_json(target, _get(t, "out"))
        if key in images:
            el = Element._raw(target, dict(images[key])) + el
        images[key] = dict(el.terms)
    return {k: v for k, v in images.items() if v}


def _rational_table(gb: GradedBasis, ring: RingMode, data, arity: int, what: str) -> dict:
    """Parse ``[{"in": ..., "out": [{"atom", "coeff"}]}]`` with rational coefficients."""
    if not isinstance(data, list):
        raise SchemaError(f"{what} must be a list")
    table: dict = {}
    for t in data:
        raw_in = _get(t, "in")
        if arity == 1:
            key = gb.index(str(raw_in))
        else:
            if not isinstance(raw_in, list) or len(raw_in) != arity:
                raise SchemaError(f"{what} input must be a list of {arity} atoms")
            key = tuple(gb.index(str(a)) for a in raw_in)
        out: dict = {}
        for term in _get(t, "out", list):
            atom = _get(term, "atom")
            if arity == 1 and what == "delta":
                if not isinstance(atom, list) or len(atom) != 2:
                    raise SchemaError("delta output atoms are pairs of names")
                k2 = (gb.index(str(atom[0])), gb.index(str(atom[1])))
            else:
                k2 = gb.index(str(atom))
            out[k2] = out.get(k2, 0) + _rational(_get(term, "coeff"), ring, what)
        table[key] = {k: q for k, q in out.items() if q}
    return table


def algebra_from_json(data: Mapping, overrides: Mapping | None = None,
                      mode_override: str | None = None) -> MVAlgebra:
    ring, D = ring_from_json(_get(data, "mode", str), data.get("trunc", {}), overrides, mode_override)
    flavor = _get(data, "flavor", str)
    gb = GradedBasis.from_json(_get(data, "generators", list))
    name = data.get("name")
    if flavor == "symmetric":
        for k in ("mu", "delta", "eps"):
            if k in data:
                raise SchemaError(f"symmetric flavor takes no {k!r} table")
        if D is None:
            raise SchemaError("symmetric flavor needs trunc.D")
        sym = SymmetricAlgebra(gb, D, ring)
        shell = SymmetricMVAlgebra(sym)
        return SymmetricMVAlgebra(sym, _images_from_json(shell, shell, data.get("Delta", [])), name=name)
    if flavor not in ("explicit", "supertrivial"):
        raise SchemaError(f"unknown flavor {flavor!r}")
    unit = gb.index(str(data.get("unit", gb.names[0])))
    eps = None
    if "eps" in data:
        eps = {}
        for term in _get(data, "eps", list):
            eps[gb.index(str(_get(term, "atom")))] = _rational(_get(term, "coeff"), ring, "eps")
    shell = ExplicitMVAlgebra(gb, ring, unit=unit)
    Delta = _images_from_json(shell, shell, data.get("Delta", []))
    if flavor == "supertrivial":
        for k in ("mu", "delta"):
            if k in data:
                raise SchemaError(f"supertrivial flavor takes no {k!r} table")
        return make_supertrivial(gb, eps or {unit: 1}, unit, Delta, ring, name=name)
    mu = _rational_table(gb, ring, data.get("mu", []), 2, "mu")
    delta = _rational_table(gb, ring, data.get("delta", []), 1, "delta")
    return ExplicitMVAlgebra(gb, ring, unit=unit, mu=mu, delta=delta or None, eps=eps, Delta=Delta, name=name)


def _atom_table(gb: GradedBasis, table: Mapping, pair_out: bool) -> list:
    out = []
    for key in sorted(table):
        img = table[key]
        if not img:
            continue
        k_json = [gb.names[i] for i in key] if isinstance(key, tuple) else gb.names[key]
        terms = []
        for k2 in sorted(img):
            atom = [gb.names[k2[0]], gb.names[k2[1]]] if pair_out else gb.names[k2]
            q = Fraction(img[k2])
            terms.append({"atom": atom, "coeff": [{"h": 0, "l": 0, "q": f"{q.numerator}/{q.denominator}"}]})
        out.append({"in": k_json, "out": terms})
    return out


def algebra_to_json(A: MVAlgebra) -> dict:
    if isinstance(A, SymmetricMVAlgebra):
        mode, trunc = ring_to_json(A.ring, A.D)
        doc = {"mode": mode, "trunc": trunc, "flavor": "symmetric", "generators": A.U.to_json(),
               "Delta": A.Delta.to_json()}
    elif isinstance(A, ExplicitMVAlgebra):
        mode, trunc = ring_to_json(A.ring)
        gb = A.gb
        doc = {
            "mode": mode, "trunc": trunc, "flavor": "explicit", "generators": gb.to_json(),
            "unit": gb.names[A.unit],
            "mu": _atom_table(gb, A._mu_given, False),
            "delta": _atom_table(gb, A._delta_given, True),
            "eps": [{"atom": gb.names[i], "coeff": [{"h": 0, "l": 0, "q": f"{q.numerator}/{q.denominator}"}]}
                    for i, q in sorted(A._eps.items()) if q],
            "Delta": A.Delta.to_json(),
        }
    else:
        raise SchemaError(f"{A!r} has no JSON presentation")
    if getattr(A, "name", None):
        doc["name"] = A.name
    return doc


# ---------------------------------------------------------------- documents

class Loader:
    """Resolves algebra references and shares algebra objects between documents.

    Two references to the same file, or two identical inline presentations,
    yield the same algebra object, so maps between them compose.
    """

    def __init__(self, overrides: Mapping | None = None, mode_override: str | None = None):
        self.overrides = dict(overrides or {})
        self.mode_override = mode_override
        self._cache: dict = {}

    def read(self, path: str | Path) -> tuple[Any, Path]:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise SchemaError(f"cannot read {p}: {exc.strerror}") from exc
        try:
            return json.loads(text), p.resolve().parent
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{p}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc

    def algebra(self, ref, base: Path) -> MVAlgebra:
        if isinstance(ref, str):
            path = (base / ref).resolve()
            key = ("path", str(path))
            if key not in self._cache:
                data, _ = self.read(path)
                self._cache[key] = self._build(data)
            return self._cache[key]
        if isinstance(ref, Mapping):
            key = ("inline", json.dumps(ref, sort_keys=True))
            if key not in self._cache:
                self._cache[key] = self._build(ref)
            return self._cache[key]
        raise SchemaError("algebra reference must be a path or an object")

    def _build(self, data) -> MVAlgebra:
        return algebra_from_json(data, self.overrides, self.mode_override)

    def algebra_document(self, path) -> MVAlgebra:
        data, base = self.read(path)
        if isinstance(data, Mapping) and "flavor" in data:
            return self.algebra(str(Path(path).resolve()), base)
        return self.algebra(_get(data, "algebra"), base)

    def map_document(self, path) -> ConvMap:
        """``{"source", "target"?, "map" | "family"}``; target defaults to source."""
        data, base = self.read(path)
        src = self.algebra(_get(data, "source"), base)
        tgt = self.algebra(data["target"], base) if "target" in data else src
        if "map" in data:
            images = _images_from_json(src, tgt, _get(data, "map"))
        elif "family" in data:
            images = family_images_from_json(src, tgt, _get(data, "family", list))
        else:
            raise SchemaError("map document needs a 'map' or 'family' field")
        return ConvMap._raw(src, tgt, images, None)

    def candidate_document(self, path) -> MasterCandidate:
        """``{"algebra", "candidate": {"element", "laurent_form"}}``."""
        data, base = self.read(path)
        A = self.algebra(_get(data, "algebra"), base)
        return MasterCandidate.from_json(A, _get(data, "candidate"))

    def brackets_document(self, path) -> tuple[MVAlgebra, Element, list]:
        """``{"algebra", "element": S~, "brackets"?: [[element, ...], ...]}``."""
        data, base = self.read(path)
        A = self.algebra(_get(data, "algebra"), base)
        S = Element.from_json(A, _get(data, "element"))
        args = [[Element.from_json(A, e) for e in group] for group in data.get("brackets", [])]
        return A, S, args


def family_images_from_json(source, target, data) -> dict:
    images: dict = {}
    for cell in data:
        n, m = _get(cell, "n", int), _get(cell, "m", int)
        part = _images_from_json(source, target, _get(cell, "map", list))
        for x, img in part.items():
            if len(x) != n or any(len(y) != m for y in img):
                raise SchemaError(f"entry {source.key_to_json(x)!r} does not belong to cell ({n}, {m})")
            d = images.setdefault(x, {})
            for y, c in img.items():
                d[y] = d[y] + c if y in d else c
    return {k: {y: c for y, c in v.items() if c} for k, v in images.items()}


def map_to_json(f: LinMap, family: bool = False) -> dict:
    doc = {"source": algebra_to_json(f.source)}
    if f.target is not f.source:
        doc["target"] = algebra_to_json(f.target)
    if family:
        doc["family"] = family_from_images(f.source, f.target, f.images).to_json()
    else:
        doc["map"] = f.to_json()
    return doc


def candidate_to_json(S: MasterCandidate, with_algebra: bool = True) -> dict:
    doc = {"candidate": S.to_json()}
    if with_algebra:
        doc["algebra"] = algebra_to_json(S.algebra)
    return doc
