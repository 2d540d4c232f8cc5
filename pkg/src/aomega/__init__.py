"""Exact-arithmetic desk models for cyclotomic period rings and the
decalage construction, with the q-de Rham complex of the torus and its
specializations, truncated Witt vectors of perfect polynomial models, and
property-based verification suites over exact integer linear algebra."""

from .arith import (
    IntegerValue,
    LaurentElement,
    RationalExponent,
    eps_power_minus_one,
    laurent_exact_div,
    laurent_mul,
    p_valuation,
    q_analog,
    validate_exponent,
)
from .ainf import AinfModel, OCModel, OCModelElement, check_notation_identities
from .complexes import (
    ChainComplex,
    DiagonalComplex,
    HomologyPresentation,
    KoszulSummand,
    NOT_STRUCTURED,
    homology_diagonal,
    homology_snf,
    koszul,
    koszul_to_diagonal,
    mod_f,
    tensor_product,
)
from .decalage import (
    BocksteinComplex,
    ChainMap,
    TrianglePair,
    ZERO_COMPLEX,
    bockstein,
    check_composition,
    check_exactness_criterion,
    check_homology_formula,
    check_leta_mod_f_is_bockstein,
    check_mod_g_commutation,
    eta_subcomplex,
    factor_through_leta,
    leta_inverse_maps,
    leta_koszul,
)
from .torus import (
    GradingBox,
    TorusCohomologyResult,
    ainf_omega_torus,
    build_torus_cohomology,
    etale_rank_torus,
    semicontinuity_demo,
    specialize_de_rham,
    specialize_hodge_tate,
    tilde_omega_torus,
)
from .qderham import QLaurentFunction, compare_with_torus_pipeline, nabla_q, q_de_rham_complex, q_to_one
from .suites import SessionConfig, VerificationReport, run_suite
from .witt import (
    PerfectionElement,
    SemilinearModule,
    TruncatedWittElement,
    digits_to_witt,
    frobenius_fixed_points,
    teichmuller_digits,
    teichmuller_lift,
)

__version__ = "0.1.0"
