"""Regenerate the example corpus and its job manifest.

Run from the repository root::

    python3 corpus/generate.py

Every file is written with canonical JSON so the output is stable.
"""

from __future__ import annotations

import random
from pathlib import Path

from mvalgebra import (
    GradedBasis,
    MasterCandidate,
    RingMode,
    Scalar,
    SymmetricMVAlgebra,
    make_supertrivial,
)
from mvalgebra.graded import Element
from mvalgebra.qme import solve_qme_by_order
from mvalgebra.serialize import algebra_to_json, dumps
from mvalgebra.testing import example_bv_algebra, random_morphism_by_conjugation

HERE = Path(__file__).resolve().parent


def q(x) -> list:
    return [{"h": 0, "l": 0, "q": f"{x}/1"}]


def write(name: str, doc) -> None:
    (HERE / name).write_text(dumps(doc), encoding="utf-8")


def supertrivial(with_delta: bool):
    ring = RingMode.hbar_aux(2, 3)
    V = GradedBasis.of([("1", 0), ("x", 0), ("y", 1), ("z", 0), ("w", 1)])
    Delta = {"x": {"y": 1}, "z": {"w": Scalar.hbar(ring)}} if with_delta else None
    return make_supertrivial(V, {"1": 1}, "1", Delta, ring, name="supertrivial" if with_delta else "supertrivial, Delta = 0")


def bv_laurent():
    return example_bv_algebra(RingMode.laurent_aux(6, 3, 2))


def sym_hbar(D: int = 3):
    return SymmetricMVAlgebra.free([("a", 0), ("b", 0)], D, RingMode.hbar(3))


def main() -> None:
    st, st0, bv, sh = supertrivial(True), supertrivial(False), bv_laurent(), sym_hbar()
    write("supertrivial.json", algebra_to_json(st))
    write("supertrivial_delta0.json", algebra_to_json(st0))
    write("bv_laurent.json", algebra_to_json(bv))
    write("sym_hbar.json", algebra_to_json(sh))
    write("explicit_bad_unit.json", {
        "mode": "k", "trunc": {}, "flavor": "explicit", "name": "Delta(1) != 0",
        "generators": [{"name": "1", "degree": 0}, {"name": "a", "degree": 1}],
        "unit": "1", "Delta": [{"in": "1", "out": [{"atom": "a", "coeff": q(1)}]}],
    })
    write("schema_bad.json", {"mode": "quantum", "flavor": "symmetric", "generators": []})

    h = [{"h": 1, "l": 0, "q": "1/1"}]
    write("family_f11.json", {"source": "sym_hbar.json", "family": [
        {"n": 1, "m": 1, "map": [{"in": ["a"], "out": [{"atom": ["b"], "coeff": q(2)}]}]}]})
    write("family_g11.json", {"source": "sym_hbar.json", "family": [
        {"n": 1, "m": 1, "map": [{"in": ["a"], "out": [{"atom": ["a"], "coeff": q(3)}]}]}]})
    write("identity_map.json", {"source": "sym_hbar.json", "map": [
        {"in": sh.key_to_json(m), "out": [{"atom": sh.key_to_json(m), "coeff": q(1)}]} for m in sh.basis]})
    write("pi1_map.json", {"source": "sym_hbar.json", "map": [
        {"in": [g], "out": [{"atom": [g], "coeff": q(1)}]} for g in ("a", "b")]})
    write("ibl_good.json", {"source": "sym_hbar.json", "family": [
        {"n": 0, "m": 1, "map": [{"in": [], "out": [{"atom": ["a"], "coeff": h}]}]},
        {"n": 1, "m": 1, "map": [{"in": ["a"], "out": [{"atom": ["a"], "coeff": q(1)}, {"atom": ["b"], "coeff": h}]}]},
        {"n": 2, "m": 1, "map": [{"in": ["a", "a"], "out": [{"atom": ["b"], "coeff": h}]}]},
        {"n": 2, "m": 2, "map": [{"in": ["a", "b"], "out": [{"atom": ["a", "b"], "coeff": h}]}]},
    ]})
    write("ibl_polluted.json", {"source": "sym_hbar.json", "family": [
        {"n": 1, "m": 1, "map": [{"in": ["a"], "out": [{"atom": ["a"], "coeff": q(1)}]}]},
        {"n": 2, "m": 1, "map": [{"in": ["a", "b"], "out": [{"atom": ["b"], "coeff": q(1)}]}]},
    ]})
    # exp of a word-length-raising map needs more room than D = 2 provides
    write("sym_hbar_d2.json", algebra_to_json(sym_hbar(2)))
    write("overflow_map.json", {"source": "sym_hbar_d2.json", "map": [
        {"in": ["a"], "out": [{"atom": ["a", "a"], "coeff": h}]}]})

    rng = random.Random(7)
    f, target = random_morphism_by_conjugation(rng, st)
    target.name = "conjugated supertrivial"
    write("morphism.json", {"source": "supertrivial.json", "target": algebra_to_json(target), "map": f.to_json()})
    write("not_morphism.json", {"source": "supertrivial.json", "target": "supertrivial.json", "map": f.to_json()})

    S = solve_qme_by_order(st, random.Random(3))
    write("solution.json", {"algebra": "supertrivial.json", "candidate": S.to_json()})
    lam = [{"h": 0, "l": 1, "q": "1/1"}]
    write("nonsolution.json", {"algebra": "supertrivial.json",
                               "candidate": {"element": [{"atom": "x", "coeff": lam}], "laurent_form": False}})
    write("qme_delta0.json", {"algebra": "supertrivial_delta0.json", "candidate": {
        "element": [{"atom": "x", "coeff": lam}, {"atom": "z", "coeff": [{"h": 1, "l": 2, "q": "-3/2"}]}],
        "laurent_form": False}})

    St = Element(bv, {bv.monomial("x", "y"): Scalar.lam(bv.ring), bv.monomial("xi", "eta"): Scalar({(1, 1): 2}, bv.ring)})
    MasterCandidate(St, laurent_form=True)
    write("brackets.json", {
        "algebra": "bv_laurent.json",
        "element": St.to_json(),
        "brackets": [
            [Element(bv, {bv.monomial("x"): 1}).to_json(), Element(bv, {bv.monomial("xi"): 1}).to_json()],
            [St.to_json(), St.to_json()],
        ],
    })

    jobs = [
        ("validate-supertrivial", "validate", ["supertrivial.json"], [], 0),
        ("validate-bv", "validate", ["bv_laurent.json"], ["--bv"], 0),
        ("validate-bad-unit", "validate", ["explicit_bad_unit.json"], [], 1),
        ("validate-schema-error", "validate", ["schema_bad.json"], [], 2),
        ("validate-shrinking-override", "validate", ["bv_laurent.json"], ["--trunc", "D=3"], 2),
        ("check-morphism", "check-morphism", ["morphism.json"], [], 0),
        ("check-non-morphism", "check-morphism", ["not_morphism.json"], [], 1),
        ("compose-11", "compose", ["family_f11.json", "family_g11.json"], [], 0),
        ("compose-11-oracle", "compose", ["family_f11.json", "family_g11.json"], ["--oracle"], 0),
        ("compose-morphisms", "compose", ["morphism.json", "unit_morphism.json"], [], 0),
        ("exp-pi1", "exp", ["pi1_map.json"], [], 0),
        ("exp-pi1-oracle", "exp", ["pi1_map.json"], ["--oracle"], 0),
        ("exp-overflow", "exp", ["overflow_map.json"], [], 2),
        ("exp-overflow-raised", "exp", ["overflow_map.json"], ["--trunc", "D=4"], 0),
        ("log-identity", "log", ["identity_map.json"], [], 0),
        ("qme-solution", "qme-check", ["solution.json"], [], 0),
        ("qme-nonsolution", "qme-check", ["nonsolution.json"], [], 1),
        ("qme-delta-zero", "qme-check", ["qme_delta0.json"], [], 0),
        ("pushforward", "pushforward", ["morphism.json", "solution.json"], [], 0),
        ("pushforward-oracle", "pushforward", ["morphism.json", "solution.json"], ["--oracle"], 0),
        ("pushforward-nonsolution", "pushforward", ["morphism.json", "nonsolution.json"], [], 1),
        ("brackets", "brackets", ["brackets.json"], [], 0),
        ("ibl-good", "ibl-check", ["ibl_good.json"], [], 0),
        ("ibl-polluted", "ibl-check", ["ibl_polluted.json"], [], 1),
    ]
    mu = mv_unit_doc(st)
    write("unit_morphism.json", mu)
    write("jobs.json", [{"name": n, "command": c, "inputs": i, "flags": fl, "exit": e} for n, c, i, fl, e in jobs])


def mv_unit_doc(A) -> dict:
    """The unit morphism ``1_V = log(id)`` of the supertrivial algebra."""
    from mvalgebra import mv_unit
    return {"source": "supertrivial.json", "map": mv_unit(A).to_json()}


if __name__ == "__main__":
    main()
