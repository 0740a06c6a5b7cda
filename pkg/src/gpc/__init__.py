"""Generalized Pauli channels over complementary subalgebras of M_n.

Builds decompositions of the full matrix algebra into pairwise
complementary subalgebras, the channels defined over them, and certifies
complete positivity analytically and through the Choi matrix.
"""

from gpc.matcore import (
    hermitian_eigenvalues,
    hs_inner,
    kron,
    matrix_unit,
    partial_trace_first,
)
from gpc.subalgebra import (
    Subalgebra,
    block_algebra,
    commutant,
    cond_exp_via_commutant,
    conditional_expectation,
    f_map,
    from_generators,
    is_complementary,
    orthonormalize,
    product_span_dim,
)
from gpc.constructions import (
    Decomposition,
    build_decomposition,
    m4_example2_decomposition,
    mub_bases,
    mub_masa_decomposition,
    pauli_matrices,
    qubit_pauli_decomposition,
    validate_decomposition,
    weyl,
)
from gpc.channel import (
    CpReport,
    GeneralizedPauliChannel,
    KrausForm,
    analytic_cp,
    apply,
    choi,
    cp_condition_qubit,
    kraus_cp_check,
    kraus_form,
    numeric_cp,
    qubit_lambda,
    qubit_mu,
    restrict_check,
    sample_cp_agreement,
)

__version__ = "0.1.0"
