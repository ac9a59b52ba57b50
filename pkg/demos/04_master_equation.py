# # Solutions of the quantum master equation as morphisms
#
# A degree-0 element S with coefficients in the maximal ideal solves the
# master equation when Delta(e^S) = 0.  Such solutions are the same thing
# as MV-morphisms out of the ground field, and they push forward along
# morphisms.

from __future__ import annotations

import random

from mvalgebra import (
    GradedBasis,
    RingMode,
    is_mv_morphism,
    is_qme_solution,
    make_supertrivial,
    morphism_to_solution,
    pushforward,
    solution_to_morphism,
)
from mvalgebra.qme import qme_report, solution_set
from mvalgebra.testing import random_morphism_by_conjugation

ring = RingMode.hbar_aux(2, 3)
V = GradedBasis.of([("1", 0), ("x", 0), ("y", 1)])
A = make_supertrivial(V, {"1": 1}, "1", {"x": {"y": 1}}, ring)

# %%
# lambda*x is not a solution: Delta(x) = y survives.

from mvalgebra import Scalar
from mvalgebra.graded import Element

S = Element(A, {1: Scalar.lam(ring)})
print(qme_report(S))

# %%
# Solutions found order by order in lambda, and the round trip through morphisms.

for S in solution_set(A, 3, seed=1):
    s = solution_to_morphism(S)
    print(S.element, "| morphism:", is_mv_morphism(s), "| round trip:", morphism_to_solution(s) == S)

# %%
# Push a solution forward along a random morphism A -> B.

f, B = random_morphism_by_conjugation(random.Random(3), A)
S = next(S for S in solution_set(A, 6, seed=4) if S.element.terms)
T = pushforward(f, S)
print("pushed forward:", T.element, "| solves in B:", is_qme_solution(T))
