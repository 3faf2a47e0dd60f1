"""Rank-one resolvent extensions of atomic Herglotz model spaces."""

from .config import DEFAULT, Tolerances
from .hspace import (
    HerglotzSpace,
    SpaceElement,
    defect_vector,
    diff_quotient,
    eval_element,
    inner,
    kernel,
    make_space,
    simplicity_rank,
    sym_and_selfadjoint,
)
from .krein import (
    ExtensionParams,
    base_defect_element,
    blaschke_condition,
    eigenvector_check,
    extension_spectrum,
    identify_params,
    interpolate_spectrum,
    krein_resolvent,
    normalized_q,
    phi_field,
    reconstruct_relation,
)
from .measures import ComplexAtomicMeasure, NonnegAtomicMeasure, jordan_decompose, support, total_variation
from .models import (
    BlaschkeProduct,
    MFunction,
    blaschke_cayley,
    conjugated_kernel,
    diagram_check,
    from_extension,
    m_eval,
    rank_one_bridge,
    rank_one_forward,
    to_extension,
)
from .qherglotz import (
    QuasiHerglotz,
    RationalForm,
    analyticity_domain,
    evaluate,
    herglotz_quadruple,
    is_herglotz,
    rational_form,
    shift_constant,
    zeros_with_multiplicity,
)
from .relations import (
    Eigenvalue,
    LinearRelationFD,
    SpectrumReport,
    matrix_spectrum,
    relation_spectrum,
    spectra_agreement,
    subspace_distance,
)

__version__ = "0.1.0"
