"""Computational toolkit for normal matrices in finite-dimensional Krein spaces."""

__version__ = "0.1.0"

from .errors import KspecError, NumericalFailure, PreconditionError, ResolventPoint
from .krein import (
    KreinSpace,
    angular_operator,
    cartesian_parts,
    fundamental_decomposition_from_projections,
    gram_adjoint,
    indefinite_product,
    is_g_normal,
    spectral_mapping,
)
from .linalg import (
    DEFAULT_TOLERANCES,
    ToleranceConfig,
    eig_structure,
    hermitian_psd_sqrt,
    nullspace,
    sylvester_solve,
)
from .pencil import (
    PencilProblem,
    build_companion,
    factorization_check,
    hyperbolic_roots,
    operator_root_via_angular,
    pencil_spectrum,
)
from .regions import Circle, Rectangle, Region
from .resolvent import (
    estimate_growth_order,
    interval_power_bound_check,
    maximal_spectral_subspace,
    power_bound_check,
    resolvent_norm,
)
from .signtype import Label, classify_point, classify_spectrum, region_is_positive_type
from .spectralfn import (
    local_spectral_function,
    riesz_projection_eig,
    riesz_projection_quadrature,
    similarity_report,
    spectral_set_projection,
    strong_stability,
    verify_lsf_axioms,
)

__all__ = [name for name in dir() if not name.startswith("_")]
