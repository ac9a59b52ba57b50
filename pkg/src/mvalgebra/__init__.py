"""Exact computations with MV-algebras over truncated local rings.

The building blocks are truncated scalars (:mod:`.scalars`), graded
spaces and maps (:mod:`.graded`), the truncated symmetric algebra
(:mod:`.symalg`), the category of MV-algebras with its convolution
exponential (:mod:`.mvcat`), component formulas for composites of maps
between symmetric algebras (:mod:`.composed`) and the quantum master
equation (:mod:`.qme`).
"""

from .errors import *  # noqa: F401,F403
from .scalars import Mode, RingMode, Scalar, in_maximal_ideal, scalar_arith, scalar_exp
from .graded import (
    Element,
    FreeSpace,
    GradedBasis,
    LinMap,
    TensorSpace,
    block_sign,
    is_unshuffle,
    koszul_sign,
    map_compose,
    set_partitions,
    unshuffles,
)
from .symalg import (
    SymmetricAlgebra,
    coproduct,
    iterated_diagonal,
    iterated_product,
    pi1,
    reduced_diagonal_power,
    sym_product,
)
from .mvcat import (
    ConvMap,
    ExplicitMVAlgebra,
    MVAlgebra,
    Report,
    SymmetricMVAlgebra,
    TensorMVAlgebra,
    congruence_check_multiplicativity,
    conv_unit,
    convolution,
    diamond,
    divided_power_coalgebra,
    exp_map,
    exterior_algebra,
    ground_algebra,
    identity_map,
    is_bialgebra,
    is_lin0,
    is_mv_morphism,
    is_tilde_morphism,
    log_map,
    make_supertrivial,
    make_trivial_coproduct,
    make_trivial_product,
    mv_unit,
    oslash_algebras,
    oslash_morphisms,
    truncated_polynomial_algebra,
    validate_mv,
    zero_map,
)
from .composed import (
    ComponentFamily,
    assemble,
    components,
    compose_definitional,
    compose_explicit,
    connectivity,
    hbar_split,
    is_bv_infinity,
    is_ibl_family,
    is_munster_sachs_family,
    l_infty_brackets,
    operator_order,
    phi_n,
    psi,
    psi_by_connectivity,
)
from .qme import (
    MasterCandidate,
    algebra_exp,
    at_most_simple_pole,
    higher_derived_bracket,
    is_qme_solution,
    mc_residual,
    morphism_to_solution,
    pushforward,
    solution_to_morphism,
    solve_qme_by_order,
    transfer_check,
)

__version__ = "0.1.0"
