"""riccati-lab: discrete-time Riccati matrix difference equations.

Fixed points and stability certificates, directed products of step matrices
with their Gramians, a factorization of those products with uniform inverse
bounds, duality identities of the semigroup, and two-sided uniform bounds,
each exposed as a computable operation with a residual certificate.
"""

from ._backend import available_backends, get_backend
from .config import DEFAULT_TOLERANCES, Tolerances, fixed_point_tol
from .dare import (
    FixedPointPair,
    limit_gramian,
    lyapunov_solve_dual,
    lyapunov_solve_series,
    negative_fixed_point,
    solve_fixed_point,
)
from .errors import (
    BoundViolation,
    Divergence,
    IdentityViolation,
    InvalidHorizon,
    NoConvergence,
    NotPd,
    NotPsd,
    NotSymmetric,
    RiccatiLabError,
    ScanExhausted,
    SingularA,
    SingularFactor,
    SingularL,
    SpectralCertificateFailure,
    UncertifiedSystem,
)
from .floquet import (
    DualityReport,
    FloquetCertificate,
    LipschitzConstants,
    UniformBoundReport,
    compute_n_epsilon,
    duality_check,
    duality_report,
    explicit_solution,
    floquet_factorize,
    iota_bound,
    l_map,
    lipschitz_constants,
    n_epsilon_persists,
    omega_gramian,
    product_deviation,
    uniform_bounds,
)
from .matrices import (
    LoewnerComparison,
    LoewnerRelation,
    PdMatrix,
    PsdMatrix,
    SymmetricMatrix,
    gelfand_estimate,
    loewner_compare,
    principal_sqrt,
    scale_of,
    smw_inverse,
    spectral_norm,
    spectral_radius,
    symmetrize,
)
from .riccati import (
    AlphaBounds,
    IdentityReport,
    RiccatiTrajectory,
    alpha_bounds,
    frechet_apply,
    map_E,
    map_F,
    parallel_add,
    phi,
    phi_hat,
    phi_n,
    phi_raw,
    verify_identities,
)
from .sysfile import load_system, save_system, system_to_dict
from .systems import (
    AssumptionCertificate,
    SystemTriple,
    certify,
    check_reach_pd,
    controllability_rank,
    dual,
    observability_rank,
    pbh_observability,
    random_pd,
    random_psd,
    random_system,
    require_certified,
)
from .verification import AnalysisReport, CheckResult, analysis_report

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # configuration
    "Tolerances", "DEFAULT_TOLERANCES", "fixed_point_tol",
    "get_backend", "available_backends",
    # matrix substrate
    "SymmetricMatrix", "PsdMatrix", "PdMatrix",
    "LoewnerRelation", "LoewnerComparison",
    "symmetrize", "spectral_norm", "spectral_radius", "scale_of",
    "smw_inverse", "principal_sqrt", "loewner_compare", "gelfand_estimate",
    # systems
    "SystemTriple", "AssumptionCertificate",
    "controllability_rank", "observability_rank", "pbh_observability",
    "check_reach_pd", "dual", "certify", "require_certified",
    "random_system", "random_psd", "random_pd",
    # the maps
    "RiccatiTrajectory", "AlphaBounds", "IdentityReport",
    "phi", "phi_raw", "phi_hat", "phi_n", "map_E", "map_F",
    "alpha_bounds", "parallel_add", "frechet_apply", "verify_identities",
    # fixed points
    "FixedPointPair", "solve_fixed_point",
    "lyapunov_solve_series", "lyapunov_solve_dual",
    "limit_gramian", "negative_fixed_point",
    # factorization and bounds
    "FloquetCertificate", "DualityReport", "LipschitzConstants",
    "UniformBoundReport",
    "iota_bound", "l_map", "floquet_factorize",
    "duality_report", "duality_check",
    "explicit_solution", "product_deviation", "lipschitz_constants",
    "omega_gramian", "compute_n_epsilon", "n_epsilon_persists",
    "uniform_bounds",
    # verification and files
    "AnalysisReport", "CheckResult", "analysis_report",
    "load_system", "save_system", "system_to_dict",
    # errors
    "RiccatiLabError", "NotSymmetric", "NotPsd", "NotPd", "SingularFactor",
    "UncertifiedSystem", "IdentityViolation", "NoConvergence",
    "SpectralCertificateFailure", "Divergence", "SingularA",
    "InvalidHorizon", "SingularL", "ScanExhausted", "BoundViolation",
]
