# # hbar-divisibility is closed under composition
#
# A family f^m_n is of IBL type when each cell with n >= 1 is divisible
# by hbar^(n-1) and f(1) has no hbar^0 part.  Composites of such families
# stay divisible; a family with an hbar^0 term in the (2,1) cell does not
# pass the check.

from __future__ import annotations

import random

from mvalgebra import RingMode, Scalar, SymmetricMVAlgebra, components, compose_explicit, is_ibl_family
from mvalgebra.composed import family_from_images, ibl_witness
from mvalgebra.testing import random_ibl_family_map, random_lin0_map

ring = RingMode.hbar(3)
rng = random.Random(7)
# g may raise word length by up to H - 1, so the later algebras get room
A = SymmetricMVAlgebra.free([("a", 0), ("b", 1)], 2, ring)
B = SymmetricMVAlgebra.free([("p", 0), ("q", 0)], 4, ring)
C = SymmetricMVAlgebra.free([("s", 0)], 4, ring)

passed = 0
for _ in range(10):
    g = components(random_ibl_family_map(rng, A, B))
    f = components(random_lin0_map(rng, B, C, growth="none", hbar_divisible=True, density=0.5))
    assert is_ibl_family(f) and is_ibl_family(g)
    passed += is_ibl_family(compose_explicit(f, g))
print("composites passing:", passed, "of 10")

# %%
# Pollute the (2,1) cell with an hbar^0 coefficient.

bad = family_from_images(B, B, {B.monomial("p", "q"): {B.monomial("p"): Scalar.one(ring)}})
print("polluted family passes:", is_ibl_family(bad))
print("witness:", ibl_witness(bad))
