"""curvforge: deform invariant metrics, bound curvature, certify positivity.

A numerical workbench for one-parameter deformations of G-invariant metrics
(shrinking along group orbits), their extension to fiber bundles with a
compact structure group, and certified lower bounds for the deformed
sectional and Ricci curvature, including an asymptotic positivity
certificate and a minimal-certified-time search.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .bundle import (
    BundleData,
    BundleVector,
    ProductVector,
    asymptotic_residuals,
    diagonal_action_vector,
    full_orbit_space,
    horizontal_basis,
    horizontal_lift,
    induced_orbit_tensor,
    induced_reparam_operator,
    product_metric_inner,
    ricci_asymptotic_lower,
    ricci_ht_lower,
    sectional_lower,
    submersion_differential,
)
from .catalog import (
    CATALOG,
    Scenario,
    catalog_names,
    load_scenario,
    scenario_from_dict,
)
from .certify import (
    CERTIFIED_POSITIVE,
    NOT_CERTIFIED,
    Certificate,
    SweepResult,
    SweepRow,
    asymptotic_certificate,
    certify,
    coords_to_vector,
    find_min_certified_t,
    frame_dim,
    min_ricci_lower,
    ricci_form_matrix,
    sweep,
)
from .cheeger import (
    CurvatureOracle,
    DeformationState,
    MixedVector,
    OrbitTensor,
    apply_metric_tensor,
    apply_metric_tensor_inverse,
    ct_vertical_matrix,
    deform_orbit_tensor,
    deformed_ricci_lower,
    frame_coordinates,
    horizontal_ricci,
    orthonormal_eigenframe,
    reparam_sectional_exact,
    reparam_sectional_lower,
    sectional_residual,
)
from .errors import (
    CertificationError,
    CurvforgeError,
    MalformedInputError,
    NotSPDError,
    NumericalError,
    ScenarioValidationError,
    SubalgebraError,
    UnknownScenarioError,
    UnsupportedModeError,
)
from .lie_core import (
    IsotropyDecomposition,
    LieAlgebraData,
    ValidationItem,
    ValidationReport,
    bracket_gap_constant,
    isotropy_split,
    normal_homogeneous_ricci,
    normal_homogeneous_ricci_matrix,
    validate_algebra,
)
from .oracle import (
    LeftInvariantMetric,
    block_oracle,
    connection_coefficients,
    constant_curvature_oracle,
    curvature_tensor,
    curvature_tensor_algebra,
    deformed_metric,
    ricci_quadratic_form,
    sectional_numerator,
)

__all__ = [
    "__version__",
    # errors
    "CurvforgeError",
    "MalformedInputError",
    "NotSPDError",
    "SubalgebraError",
    "UnsupportedModeError",
    "UnknownScenarioError",
    "ScenarioValidationError",
    "CertificationError",
    "NumericalError",
    # lie_core
    "LieAlgebraData",
    "ValidationItem",
    "ValidationReport",
    "validate_algebra",
    "IsotropyDecomposition",
    "isotropy_split",
    "normal_homogeneous_ricci",
    "normal_homogeneous_ricci_matrix",
    "bracket_gap_constant",
    # cheeger
    "OrbitTensor",
    "MixedVector",
    "DeformationState",
    "deform_orbit_tensor",
    "ct_vertical_matrix",
    "CurvatureOracle",
    "frame_coordinates",
    "apply_metric_tensor",
    "apply_metric_tensor_inverse",
    "orthonormal_eigenframe",
    "reparam_sectional_lower",
    "reparam_sectional_exact",
    "sectional_residual",
    "horizontal_ricci",
    "deformed_ricci_lower",
    # oracle
    "LeftInvariantMetric",
    "connection_coefficients",
    "curvature_tensor_algebra",
    "curvature_tensor",
    "deformed_metric",
    "ricci_quadratic_form",
    "sectional_numerator",
    "constant_curvature_oracle",
    "block_oracle",
    # bundle
    "BundleVector",
    "ProductVector",
    "BundleData",
    "full_orbit_space",
    "induced_orbit_tensor",
    "induced_reparam_operator",
    "horizontal_lift",
    "submersion_differential",
    "diagonal_action_vector",
    "product_metric_inner",
    "horizontal_basis",
    "sectional_lower",
    "ricci_ht_lower",
    "ricci_asymptotic_lower",
    "asymptotic_residuals",
    # certify
    "CERTIFIED_POSITIVE",
    "NOT_CERTIFIED",
    "Certificate",
    "SweepRow",
    "SweepResult",
    "frame_dim",
    "coords_to_vector",
    "ricci_form_matrix",
    "min_ricci_lower",
    "asymptotic_certificate",
    "find_min_certified_t",
    "certify",
    "sweep",
    # catalog
    "Scenario",
    "CATALOG",
    "catalog_names",
    "load_scenario",
    "scenario_from_dict",
]
