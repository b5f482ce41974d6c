"""Invariant block multilinear completely positive maps on finite-dimensional
C*-algebras: representations, Gram kernels, Stinespring-type dilations, and
norm attainment checks."""

from .algebra import (
    Algebra,
    AlgebraElement,
    Amplification,
    MatrixOverAlgebra,
    amplified_algebra,
    element_norm,
    is_positive_element,
    multiply,
    project_unit_ball,
    random_element,
    random_psd,
    star,
)
from .blockmap import BlockMultilinearMap, as_block_map
from .errors import (
    AlgebraMismatchError,
    ArityError,
    NonHermitianGramError,
    NotCompletelyPositiveError,
    QuotientDescentError,
    SpecFormatError,
)
from .factory import (
    build_corpus,
    commutative_invariant_family,
    from_dilation_data,
    noninvariant_block_example,
    point_evaluation_example,
    random_icp,
    schur_block_map,
    tensor_commuting_reps,
    trace_example,
)
from .gram import (
    Counterexample,
    GramKernel,
    RefutationRecord,
    admissibility_report,
    build_gram,
    cp_refute,
    gram_is_psd,
    positivity_falsify,
    sample_admissible_tuple,
)
from .multimap import MultilinearMap, amplified_evaluate
from .norms import (
    NormEstimate,
    brute_force_commutative_norm,
    cb_16_bound_check,
    cb_russo_dye_check,
    norm_estimate,
    russo_dye_check,
    unit_norm,
)
from .stinespring import (
    DilationTriple,
    EquivalenceReport,
    MinimalityReport,
    dilate,
    block_state_vectors,
    minimal_compress,
    unitary_equivalence,
    verify_dilation,
)

__all__ = [
    "Algebra",
    "AlgebraElement",
    "AlgebraMismatchError",
    "Amplification",
    "ArityError",
    "BlockMultilinearMap",
    "Counterexample",
    "DilationTriple",
    "EquivalenceReport",
    "GramKernel",
    "MatrixOverAlgebra",
    "MinimalityReport",
    "MultilinearMap",
    "NonHermitianGramError",
    "NormEstimate",
    "NotCompletelyPositiveError",
    "QuotientDescentError",
    "RefutationRecord",
    "SpecFormatError",
    "admissibility_report",
    "amplified_algebra",
    "amplified_evaluate",
    "as_block_map",
    "brute_force_commutative_norm",
    "build_corpus",
    "build_gram",
    "cb_16_bound_check",
    "commutative_invariant_family",
    "cb_russo_dye_check",
    "cp_refute",
    "dilate",
    "element_norm",
    "from_dilation_data",
    "gram_is_psd",
    "is_positive_element",
    "block_state_vectors",
    "minimal_compress",
    "multiply",
    "noninvariant_block_example",
    "norm_estimate",
    "point_evaluation_example",
    "positivity_falsify",
    "project_unit_ball",
    "random_element",
    "random_icp",
    "random_psd",
    "russo_dye_check",
    "sample_admissible_tuple",
    "schur_block_map",
    "star",
    "tensor_commuting_reps",
    "trace_example",
    "unit_norm",
    "unitary_equivalence",
    "verify_dilation",
]
