# # Higher derived brackets and the Maurer-Cartan form
#
# With S = S~/hbar, the master equation is equivalent to
#   Delta S~ + sum_n l_n(S~, ..., S~)/n! = 0,
# where l_n is built from the n-th commutator of Delta with multiplication
# operators and divided by hbar^(n-1).

from __future__ import annotations

from mvalgebra import RingMode, Scalar, higher_derived_bracket, mc_residual
from mvalgebra.graded import Element
from mvalgebra.qme import derived_bracket_identity
from mvalgebra.testing import example_bv_algebra

ring = RingMode.laurent_aux(6, 3, 2)
A = example_bv_algebra(ring)
print("Delta =", A.name)

x, xi, eta = A.gen("x"), A.gen("xi"), A.gen("eta")
print("l_2(x, xi) =", higher_derived_bracket(A, 2, [x, xi]))
print("l_2(x, xi eta) =", higher_derived_bracket(A, 2, [x, A.mul(xi, eta)]))

# %%
# Each summand below solves on its own; the sum does not, because of l_2.

lam = Scalar.lam(ring)
for terms in ({A.monomial("x"): lam}, {A.monomial("xi", "eta"): lam},
              {A.monomial("x"): lam, A.monomial("xi", "eta"): lam}):
    St = Element(A, terms)
    lhs, rhs = derived_bracket_identity(A, St)
    print(St, "| identity holds:", lhs == rhs, "| residual:", mc_residual(A, St))
