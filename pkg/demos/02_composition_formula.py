# # Composing maps between symmetric algebras
#
# The composite f <> g = log(exp f o exp g) can be computed directly from
# the components of f and g by summing over connected bipartite graphs.
# Here both routes are run on random maps and compared cell by cell.

from __future__ import annotations

import random
import time

from mvalgebra import RingMode, SymmetricMVAlgebra, components, compose_definitional, compose_explicit
from mvalgebra.testing import random_lin0_map

ring = RingMode.hbar(3)
rng = random.Random(2024)
A = SymmetricMVAlgebra.free([("u", 0), ("v", 1)], 3, ring)
B = SymmetricMVAlgebra.free([("p", 0), ("q", -1)], 3, ring)
C = SymmetricMVAlgebra.free([("s", 0), ("t", 0)], 3, ring)

g = components(random_lin0_map(rng, A, B, density=0.6))
f = components(random_lin0_map(rng, B, C, density=0.4))
print("g has cells", g.cells())
print("f has cells", f.cells())

# %%

t0 = time.perf_counter()
fast = compose_explicit(f, g)
t1 = time.perf_counter()
slow = compose_definitional(f, g)
t2 = time.perf_counter()
print(f"graph formula {t1 - t0:.3f}s, definition {t2 - t1:.3f}s")
print("agree:", fast == slow)

# %%
# A single cell of the composite.

n, m = fast.cells()[-1]
print(f"cell ({n},{m}):")
for x, img in fast.cell(n, m).items():
    print(" ", x, "->", img)
