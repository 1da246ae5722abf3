"""Backward errors, minimal perturbations and structured linearizations
for palindromic matrix polynomials."""

from .backward_error import (
    CoefficientPair,
    backward_error_report,
    eta_structured,
    eta_structured_H,
    eta_structured_T,
    eta_unstructured,
    h_rhat,
    half_power_sums,
    projections,
    t_coefficients,
)
from .errors import (
    InconsistencyError,
    NumericalError,
    PalbeError,
    RootFindingError,
    ValidationError,
)
from .linalg import (
    determinant,
    pseudoinverse,
    scalar_poly_roots,
    spectral_norm,
    svd,
    unitary_completion,
)
from .linearization import (
    Pencil,
    advise_H,
    advise_T,
    ansatz_admissible,
    build_structured_pencil,
    default_ansatz,
    lifted_eigenvector,
    pencil_backward_error,
    ratio_report,
    relation_checks,
)
from .oracle import (
    dkw_grid_oracle,
    frobenius_oracle,
    min_norm_scalar,
    min_norm_vector,
    unstructured_oracle,
)
from .perturbations import (
    StructuredPerturbation,
    dkw_complete,
    existence_perturbation,
    minimal_perturbation,
    minimal_perturbation_H,
    minimal_perturbation_T,
    solution_family_offset,
)
from .polynomial import (
    ALL_STRUCTURES,
    ApproxEigenpair,
    MatrixPolynomial,
    Structure,
    adjoint_reversal,
    eigensymmetry_check,
    poly_from_json,
    poly_to_json,
    random_structured,
    residual,
    structure_residual,
    vector_from_json,
    vector_to_json,
)

__version__ = "0.1.0"
