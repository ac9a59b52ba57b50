# # The unit of the MV-category is the generator projection
#
# On a truncated symmetric algebra S(U) the convolution exponential of the
# projection pi_1 onto the generators is the identity map.  This script
# checks that on a small algebra and looks at the n!-identity behind it.

from __future__ import annotations

from mvalgebra import RingMode, SymmetricMVAlgebra, exp_map, identity_map, log_map, pi1
from mvalgebra.graded import Element
from mvalgebra.symalg import iterated_diagonal, iterated_product

ring = RingMode.hbar(2)
A = SymmetricMVAlgebra.free([("a", 0), ("b", 1), ("c", -2)], 4, ring)
print(A, "with", len(A.basis), "monomials")

# %%
# exp(pi_1) = id and log(id) = pi_1, exactly.

P = pi1(A)
print("exp(pi_1) == id:", exp_map(P) == identity_map(A))
print("log(id) == pi_1:", log_map(identity_map(A)) == P)

# %%
# The k-fold diagonal followed by pi_1 in every slot and the product gives
# n! on words of length n = k, and zero otherwise.

word = A.monomial("a", "a", "b")
x = Element(A.sym, {word: 1})
for k in range(1, 5):
    T = iterated_diagonal(x, k)
    linear = {key: c for key, c in T.terms.items() if all(len(w) == 1 for w in key)}
    print(k, iterated_product(Element(T.space, linear), A.sym))
