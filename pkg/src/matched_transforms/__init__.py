"""Group-matched transform toolkit.

Finite permutation actions on signal indices, the fixed orthonormal bases
matched to them (Fourier, cosine, Walsh-Hadamard, Haar, and sampled
syntheses), diagnostics that verify a basis diagonalizes every invariant
covariance, and a search that recovers the symmetry group of a given
covariance from scratch.
"""

from .errors import (
    BasisError,
    DegeneracyMismatchError,
    DegenerateSampleError,
    DimensionError,
    IllConditionedMetricError,
    InputError,
    NotMultiplicityFreeError,
    NumericError,
    SearchExhausted,
    StructuralMismatchError,
    ToolkitError,
    UndefinedResidualError,
    UnsupportedGroupError,
)
from .groups import (
    GroupAction,
    Permutation,
    closure_enumerate,
    from_generators,
    is_invariant,
    make_boolean,
    make_cyclic,
    make_dihedral,
    make_dyadic_wreath,
    make_hybrid,
    make_product,
    make_trivial,
    make_wreath,
    pair_orbits,
    parse_group_spec,
    parse_permutation,
    reynolds_project,
)
from .numkernel import (
    gevp_min,
    herm_eig,
    hungarian_max,
    kron,
    random_psd,
    svd_singular_values,
)
from .transforms import (
    IntTransform,
    SynthesizedBasis,
    UnitaryTransform,
    anf_coefficients,
    arithmetic_matrix,
    best_polarity,
    central_projection_basis,
    compose_direct,
    dct2_matrix,
    dft_matrix,
    even_extension_isometry,
    fp_rm_matrix,
    haar_matrix,
    hartley_matrix,
    rm_matrix,
    semidirect_dct_cascade,
    synthesize_matched,
    wht_matrix,
    wreath_matrix,
)
from .diagnostics import (
    ClusterSet,
    MatchReport,
    circle_check,
    coloring_alpha,
    dct_fold_cov,
    eigen_clusters,
    multiplicity_free_probe,
    residual_delta,
    sample_invariant_cov,
    subspace_match,
)
from .discovery import (
    CandidateBasis,
    DiscoveryResult,
    LibraryMatch,
    LibraryReport,
    build_gevp,
    dc_gevp_step,
    discover_sequential,
    double_commutator,
    match_library,
    round_to_permutation,
)
from .matrixio import (
    ReportDocument,
    parse_matrix,
    read_matrix_file,
    render_matrix,
    write_matrix_file,
)
from .rng import normal_rows

__version__ = "0.1.0"

__all__ = [
    "BasisError", "ClusterSet", "CandidateBasis", "DegeneracyMismatchError",
    "DegenerateSampleError", "DimensionError", "DiscoveryResult", "GroupAction",
    "IllConditionedMetricError", "InputError", "IntTransform", "LibraryMatch",
    "LibraryReport", "MatchReport", "NotMultiplicityFreeError", "NumericError",
    "Permutation",
    "ReportDocument", "SearchExhausted", "StructuralMismatchError",
    "SynthesizedBasis", "ToolkitError", "UndefinedResidualError",
    "UnitaryTransform", "UnsupportedGroupError", "anf_coefficients",
    "arithmetic_matrix", "best_polarity", "build_gevp", "central_projection_basis",
    "circle_check", "closure_enumerate", "coloring_alpha", "compose_direct",
    "dc_gevp_step", "dct2_matrix", "dct_fold_cov", "dft_matrix",
    "discover_sequential", "double_commutator", "eigen_clusters",
    "even_extension_isometry", "fp_rm_matrix", "from_generators", "gevp_min",
    "haar_matrix", "hartley_matrix", "herm_eig", "hungarian_max", "is_invariant",
    "kron", "make_boolean", "make_cyclic", "make_dihedral", "make_dyadic_wreath",
    "make_hybrid", "make_product", "make_trivial", "make_wreath", "match_library",
    "multiplicity_free_probe", "normal_rows", "pair_orbits", "parse_group_spec",
    "parse_matrix", "parse_permutation", "random_psd", "read_matrix_file",
    "render_matrix", "residual_delta", "reynolds_project", "rm_matrix",
    "round_to_permutation", "sample_invariant_cov", "semidirect_dct_cascade",
    "subspace_match", "svd_singular_values", "synthesize_matched", "wht_matrix",
    "wreath_matrix", "write_matrix_file",
]
