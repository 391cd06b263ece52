"""Optimal stopping of discounted Brownian motion with quadratic reward.

The library computes the free boundary of the perpetual problem

    sup_tau  E[ e^{-r tau} sum_i lambda_i X_i(tau)^2 ],

where X is d-dimensional Brownian motion, by collocating an integral
equation in the Martin kernels e^{a . x}, |a|^2 = 2r, and certifies the
result through independent Green-kernel, analytic, and Monte Carlo
routes.
"""

from .grids import SphereGrid, make_circle_grid, make_sphere_grid
from .kernels import (
    DiscreteMixture,
    KillingConfig,
    MartinDirection,
    green_kernel,
    green_kernel_radial,
    green_ratio,
    harmonic_mixture,
    hyperplane_identity,
    martin_kernel,
    transition_density,
    uniform_circle_mixture,
)
from .martin_solver import (
    SolveConfig,
    SolveReport,
    radial_moment,
    radial_form_audit,
    solve_boundary,
)
from .oracles import (
    Bracket,
    BracketError,
    ConvergenceError,
    QuadratureError,
    bessel2_value_iteration_radius,
    brent_root,
    quad_adaptive_1d,
    resolvent_time_quadrature,
    symmetric_radius,
)
from .problem import (
    ClassCheckReport,
    QuadraticProblem,
    StarBoundary,
    class_membership_check,
    load_problem,
)
from .specfun import HalfIntOrder, bessel_I, bessel_K, bessel_K_log, bessel_K_scaled
from .verification import (
    MCConfig,
    VerificationReport,
    green_integral_over_C,
    green_measure_identity_check,
    majorant_gap_scan,
    mc_value,
    run_verification,
    value,
)

__version__ = "0.1.0"

__all__ = [
    "Bracket",
    "BracketError",
    "ClassCheckReport",
    "ConvergenceError",
    "DiscreteMixture",
    "HalfIntOrder",
    "KillingConfig",
    "MartinDirection",
    "MCConfig",
    "QuadratureError",
    "QuadraticProblem",
    "SolveConfig",
    "SolveReport",
    "SphereGrid",
    "StarBoundary",
    "VerificationReport",
    "bessel2_value_iteration_radius",
    "bessel_I",
    "bessel_K",
    "bessel_K_log",
    "bessel_K_scaled",
    "brent_root",
    "class_membership_check",
    "green_integral_over_C",
    "green_kernel",
    "green_kernel_radial",
    "green_measure_identity_check",
    "green_ratio",
    "harmonic_mixture",
    "hyperplane_identity",
    "load_problem",
    "majorant_gap_scan",
    "make_circle_grid",
    "make_sphere_grid",
    "martin_kernel",
    "mc_value",
    "quad_adaptive_1d",
    "radial_form_audit",
    "radial_moment",
    "resolvent_time_quadrature",
    "run_verification",
    "solve_boundary",
    "symmetric_radius",
    "transition_density",
    "uniform_circle_mixture",
    "value",
    "__version__",
]
