"""Classification tools for symmetric 2-designs with an order-two automorphism.

The pipeline: enumerate orbit matrices for a prescribed involution
(`orbits`), expand them to incidence matrices (`indexing`), reduce to
isomorphism classes and compute automorphism groups (`canonical`), and
analyze the ternary linear codes the designs span (`gf3`).
"""

from .designs import (
    DesignError,
    IncidenceMatrix,
    Involution,
    dual,
    find_involution,
    format_incidence_stream,
    format_incidence_text,
    induced_block_perm,
    involution_census,
    involutions,
    parse_incidence_stream,
    parse_incidence_text,
    relabel,
    validate_symmetric_design,
)
from .orbits import (
    EnumerationOptions,
    OrbitMatrix,
    OrbitStructure,
    RowType,
    SearchStats,
    enumerate_orbit_matrices,
    format_orbit_matrix,
    format_orbit_matrix_stream,
    generate_row_types,
    orbit_matrices_equivalent,
    orbit_matrix_key,
    orbit_structure,
    parse_orbit_matrix,
    parse_orbit_matrix_stream,
    rows_compatible,
    verify_orbit_matrix,
)
from .indexing import (
    IndexingBudgetError,
    cell_expansions,
    collapse_to_orbit_matrix,
    free_cell_count,
    index_orbit_matrix,
    index_orbit_matrix_all,
    structure_involution,
)
from .canonical import (
    ALGORITHM_VERSION,
    AutGroup,
    CanonicalForm,
    DedupeClass,
    DedupeStore,
    StoreVersionError,
    automorphism_group,
    canonical_form,
    canonical_matrix_key,
    dedupe,
    group_elements,
    is_self_dual_design,
)
from .gf3 import (
    A9_BETA_RANGE,
    BudgetExceededError,
    Gf3Matrix,
    TernaryCode,
    WeightDistribution,
    a9_within_range,
    dual_code,
    format_generator_text,
    is_self_dual,
    min_weight,
    near_extremal_family,
    near_extremal_profile,
    parse_generator_text,
    rref,
    weight_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHM_VERSION",
    "A9_BETA_RANGE",
    "AutGroup",
    "BudgetExceededError",
    "CanonicalForm",
    "DedupeClass",
    "DedupeStore",
    "DesignError",
    "EnumerationOptions",
    "Gf3Matrix",
    "IncidenceMatrix",
    "IndexingBudgetError",
    "Involution",
    "OrbitMatrix",
    "OrbitStructure",
    "RowType",
    "SearchStats",
    "StoreVersionError",
    "TernaryCode",
    "WeightDistribution",
    "a9_within_range",
    "automorphism_group",
    "canonical_form",
    "canonical_matrix_key",
    "cell_expansions",
    "collapse_to_orbit_matrix",
    "dedupe",
    "dual",
    "dual_code",
    "enumerate_orbit_matrices",
    "find_involution",
    "format_generator_text",
    "format_incidence_stream",
    "format_incidence_text",
    "format_orbit_matrix",
    "format_orbit_matrix_stream",
    "free_cell_count",
    "generate_row_types",
    "group_elements",
    "index_orbit_matrix",
    "index_orbit_matrix_all",
    "induced_block_perm",
    "involution_census",
    "involutions",
    "is_self_dual",
    "is_self_dual_design",
    "min_weight",
    "near_extremal_family",
    "near_extremal_profile",
    "orbit_matrices_equivalent",
    "orbit_matrix_key",
    "orbit_structure",
    "parse_generator_text",
    "parse_incidence_stream",
    "parse_incidence_text",
    "parse_orbit_matrix",
    "parse_orbit_matrix_stream",
    "relabel",
    "rows_compatible",
    "rref",
    "structure_involution",
    "validate_symmetric_design",
    "verify_orbit_matrix",
    "weight_distribution",
]
