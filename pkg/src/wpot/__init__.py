"""Exact discrete optimal transport on the flat torus and the round sphere,
with Wasserstein-potential evaluation, measure recovery, Fourier analysis of
the cost function, and property suites for the rigidity consequences."""

from .errors import (
    InvalidCouplingError,
    PreconditionError,
    ResourceLimitError,
    UnrecoverableFrequencyError,
    UnsupportedDimensionError,
    ValidationError,
)
from .manifold import (
    BisectorSide,
    Sphere,
    SphereIsometry,
    Torus,
    TorusIsometry,
    apply_isometry,
    bisector_side,
    random_isometry,
    sphere_tangent_direction,
)
from .measure import (
    DiscreteMeasure,
    PositionPredicate,
    PositionReport,
    check_position,
    dirac,
    marginal,
    perturb_to_generic,
    pushforward,
    validate_measure,
)
from .potential import (
    ClosedFormPotential,
    RecoveryResult,
    SampledPotential,
    numeric_limit,
    potential_eval,
    recover_sphere_weights,
    recover_torus_marginals_p2,
    recover_torus_weights,
    richardson_limit,
    second_difference_ratio,
    sphere_limit_analytic,
    torus_limit_analytic,
)
from .fourier import (
    SpectrumReport,
    convolution_identity_check,
    cost_coeff_closed,
    cost_coeff_quadrature,
    cost_coeff_quadrature_2d,
    fourier_recover,
    measure_transform,
    nonvanishing_scan,
)
from .transport import (
    Coupling,
    TransportResult,
    brute_force_transport,
    coupling_cost,
    solve_transport,
    wasserstein_distance,
)
from .verify import (
    SuiteConfig,
    SuiteReport,
    center_of_mass_and_deviation,
    dirac_segment_alpha_interval,
    random_generic_measure,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "BisectorSide",
    "ClosedFormPotential",
    "Coupling",
    "DiscreteMeasure",
    "InvalidCouplingError",
    "PositionPredicate",
    "PositionReport",
    "PreconditionError",
    "RecoveryResult",
    "ResourceLimitError",
    "SampledPotential",
    "SpectrumReport",
    "Sphere",
    "SphereIsometry",
    "SuiteConfig",
    "SuiteReport",
    "Torus",
    "TorusIsometry",
    "TransportResult",
    "UnrecoverableFrequencyError",
    "UnsupportedDimensionError",
    "ValidationError",
    "apply_isometry",
    "bisector_side",
    "brute_force_transport",
    "center_of_mass_and_deviation",
    "check_position",
    "convolution_identity_check",
    "cost_coeff_closed",
    "cost_coeff_quadrature",
    "cost_coeff_quadrature_2d",
    "coupling_cost",
    "dirac",
    "dirac_segment_alpha_interval",
    "fourier_recover",
    "marginal",
    "measure_transform",
    "nonvanishing_scan",
    "numeric_limit",
    "perturb_to_generic",
    "potential_eval",
    "pushforward",
    "random_generic_measure",
    "random_isometry",
    "recover_sphere_weights",
    "recover_torus_marginals_p2",
    "recover_torus_weights",
    "richardson_limit",
    "run_suite",
    "second_difference_ratio",
    "solve_transport",
    "sphere_limit_analytic",
    "sphere_tangent_direction",
    "torus_limit_analytic",
    "validate_measure",
    "wasserstein_distance",
]
