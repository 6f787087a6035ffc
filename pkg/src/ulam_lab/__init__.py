"""ulam-lab: numerical experiments around almost-multiplicative maps.

The package turns a handful of questions about approximate group
representations into finite, checkable computations: averaging an
almost-multiplicative map into a positive definite one, deciding whether
an operator lies in the closed convex hull of a map's range, and
quantifying how far measures on nonamenable groups are from invariance.
"""

from .groups import (
    FiniteGroup,
    FreeGroup,
    GroupError,
    IntegerLattice,
    ProbMeasure,
    Word,
    folner_box,
    l1_distance,
    parse_group,
    translate_measure,
)
from .operators import (
    OperatorError,
    PsdReport,
    as_operator,
    direct_sum,
    frobenius_norm,
    inner,
    operator_norm,
    polar_unitary_factor,
    psd_min_eig,
    random_unitary,
)
from .repmaps import (
    DefectReport,
    MapDomainError,
    OperatorMap,
    defect,
    gram_block,
    pd_defect,
    perturb_representation,
    proximity,
    regular_representation,
)
from .stability import (
    FolnerReport,
    VectorFamily,
    WitnessSearchResult,
    amenable_correction,
    average_map,
    embed_direct_sum,
    find_translation_witness,
    folner_convergence_experiment,
    random_vector_family,
    snapshot_block,
    target_block,
)
from .convex import (
    HullCheckResult,
    ProjectionError,
    ProjectionResult,
    median_witness_index,
    operator_hull_check,
    project_onto_hull,
    unvectorize_operator,
    vectorize_operator,
)
from .simplex import LinProgResult, linprog_simplex
from .paradox import (
    InvarianceDefectResult,
    ParadoxicalDecomposition,
    mean_coefficient,
    min_invariance_defect,
    standard_f2_decomposition,
    tarski_defect,
    tarski_defect_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "FiniteGroup",
    "FreeGroup",
    "GroupError",
    "IntegerLattice",
    "ProbMeasure",
    "Word",
    "folner_box",
    "l1_distance",
    "parse_group",
    "translate_measure",
    "OperatorError",
    "PsdReport",
    "as_operator",
    "direct_sum",
    "frobenius_norm",
    "inner",
    "operator_norm",
    "polar_unitary_factor",
    "psd_min_eig",
    "random_unitary",
    "DefectReport",
    "MapDomainError",
    "OperatorMap",
    "defect",
    "gram_block",
    "pd_defect",
    "perturb_representation",
    "proximity",
    "regular_representation",
    "FolnerReport",
    "VectorFamily",
    "WitnessSearchResult",
    "amenable_correction",
    "average_map",
    "embed_direct_sum",
    "find_translation_witness",
    "folner_convergence_experiment",
    "random_vector_family",
    "snapshot_block",
    "target_block",
    "HullCheckResult",
    "ProjectionError",
    "ProjectionResult",
    "median_witness_index",
    "operator_hull_check",
    "project_onto_hull",
    "unvectorize_operator",
    "vectorize_operator",
    "LinProgResult",
    "linprog_simplex",
    "InvarianceDefectResult",
    "ParadoxicalDecomposition",
    "mean_coefficient",
    "min_invariance_defect",
    "standard_f2_decomposition",
    "tarski_defect",
    "tarski_defect_sweep",
    "__version__",
]
