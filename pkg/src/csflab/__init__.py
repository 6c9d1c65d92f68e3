"""Numerical laboratory for the power curve-shortening flow in a slab.

A convex complete curve with ends asymptotic to two parallel vertical lines
moves with normal speed ``kappa**alpha``.  In the normal-angle gauge the
speed ``u = kappa**alpha`` obeys a degenerate parabolic equation on
``(0, pi)``; this package integrates that equation, computes the exact
translating solitons it converges to, and certifies the quantitative
estimates behind the convergence as runnable checks.
"""

from .domain import (
    AngularGrid,
    CurveSample,
    FlowParams,
    SpeedProfile,
    SupportState,
    first_derivative,
    make_grid,
    quad_endpoint_singular,
    second_derivative,
    sin_power_integral,
)
from .errors import (
    ConfigurationError,
    CsflabError,
    DivergentIntegralError,
    EntireGraphRegimeError,
    IntegrationFailureError,
    InvalidRecipeError,
    ParameterDomainError,
    PositivityLossError,
    ReconstructionError,
)
from .estimates import (
    EntropyTrace,
    EstimateReport,
    barrier_residual,
    bisect_barrier_amplitude,
    boundary_flux_product,
    check_curvature_bounds,
    check_decay,
    check_fd_lower_bound,
    check_flux_decay,
    check_gradient_decay,
    check_harnack,
    check_poincare,
    check_second_derivative_decay,
    entropy,
    entropy_identity,
    entropy_series,
    fd_barrier_residual,
)
from .flow import (
    ExactTranslator,
    FlowState,
    FlowTrace,
    MultiplicativePerturbation,
    PiecewiseBuilt,
    PressureState,
    build_initial,
    evolve,
    evolve_pair,
    evolve_pressure,
    pressure_of,
    rhs_pressure,
    rhs_u,
    step,
    step_pressure,
)
from .geometry import (
    GraphFunction,
    reconstruct,
    support_compatibility_defect,
    support_of,
    tip_anchor,
    to_graph,
    width,
)
from .soliton import (
    Regime,
    SolitonData,
    classify_regime,
    translator_height_limit,
    translator_profile,
    translator_speed,
)

__version__ = "0.1.0"
