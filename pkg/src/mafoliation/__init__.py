"""Degenerate complex Monge-Ampere analysis for polynomial exhaustions on C^n.

Computes and verifies, at desk scale: Levi forms and their degeneracy strata,
Monge-Ampere residuals of log rho, the complex gradient field and its
least-squares extension across degenerate sets, foliation leaf flows,
weighted-homogeneity weights, and the bidegree-(k,k) criterion for
homogeneous potentials. Ships a CLI (``mafoliation``) for file-driven scans
with seeded, reproducible output.
"""

from .burns import BurnsReport, burns_check, log_growth_check
from .foliation import (
    IntegratorConfig,
    LeafTrace,
    StratumInvarianceReport,
    flow_point,
    flow_points,
    leaf_log_linearity,
    leaf_stratum_invariance,
    level_set_invariance,
    trace_leaf,
)
from .gradient import (
    CrReport,
    GradientSample,
    RealFieldKind,
    SingularHessianError,
    ThetaOrbitResult,
    complex_gradient,
    cr_residual,
    cr_scan,
    euler_residual_scan,
    extended_gradient,
    gradient_field,
    theta_orbit_det_check,
)
from .homogeneity import (
    WeightAnalysis,
    WeightVector,
    analyze_weights,
    default_lambda_samples,
    find_weights,
    flow_level_map_check,
    linear_field_agreement,
    rescale_to_level,
    verify_weights,
)
from .levi import (
    DEFAULT_TOL_RANK,
    LeviData,
    Stratum,
    levi_data,
    levi_scan,
    ma_residual,
    ma_scan,
    rank_identity_residual,
    restricted_levi_eigen,
)
from .potential import (
    PolyExpr,
    PolyPotential,
    PotentialFormatError,
    bidegree_decompose,
    evaluate,
    format_potential,
    homogeneous_degree,
    parse_potential,
    parse_potential_file,
    wirtinger_z,
    wirtinger_zbar,
)

__version__ = "0.1.0"

__all__ = [
    "BurnsReport",
    "burns_check",
    "log_growth_check",
    "IntegratorConfig",
    "LeafTrace",
    "StratumInvarianceReport",
    "flow_point",
    "flow_points",
    "leaf_log_linearity",
    "leaf_stratum_invariance",
    "level_set_invariance",
    "trace_leaf",
    "CrReport",
    "GradientSample",
    "RealFieldKind",
    "SingularHessianError",
    "ThetaOrbitResult",
    "complex_gradient",
    "cr_residual",
    "cr_scan",
    "euler_residual_scan",
    "extended_gradient",
    "gradient_field",
    "theta_orbit_det_check",
    "WeightAnalysis",
    "WeightVector",
    "analyze_weights",
    "default_lambda_samples",
    "find_weights",
    "flow_level_map_check",
    "linear_field_agreement",
    "rescale_to_level",
    "verify_weights",
    "DEFAULT_TOL_RANK",
    "LeviData",
    "Stratum",
    "levi_data",
    "levi_scan",
    "ma_residual",
    "ma_scan",
    "rank_identity_residual",
    "restricted_levi_eigen",
    "PolyExpr",
    "PolyPotential",
    "PotentialFormatError",
    "bidegree_decompose",
    "evaluate",
    "format_potential",
    "homogeneous_degree",
    "parse_potential",
    "parse_potential_file",
    "wirtinger_z",
    "wirtinger_zbar",
]
