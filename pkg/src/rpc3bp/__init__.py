"""Numerical toolkit for the planar circular restricted three-body problem
near the parabolic manifold of infinity: separatrix closed forms, Melnikov
coefficients by three independent routes, stable/unstable invariant-curve
computation on Poincare sections, splitting distances and lobe areas, the
homoclinic-tangency curve in the (mu, g0) plane, and finite-horizon
oscillatory-motion demonstrations.
"""

__version__ = "0.1.0"

from .core import (
    CartesianState,
    CollisionError,
    McGeheeState,
    Params,
    PolarState,
    PrecisionError,
    ResolutionError,
    RotatingState,
    SectionTimeoutError,
    cartesian_to_polar,
    collision_radius,
    hamiltonian_cartesian,
    hamiltonian_polar,
    hamiltonian_rotating,
    involution_R,
    jacobi_constant,
    mcgehee_local_field,
    polar_to_cartesian,
    polar_to_rotating,
    potential_V,
    rotating_to_polar,
    vector_field_rotating,
)
from .integrate import integrate, propagate_to_section
from .melnikov import (
    MelnikovSeries,
    binom_half,
    contour_integral_I,
    first_order_zero_function,
    melnikov_coeff_asymptotic,
    melnikov_coeff_contour,
    melnikov_coeff_quadrature,
    melnikov_potential,
    predicted_distance,
    predicted_lobe_area,
    predicted_tangency_mu,
    predicted_tangency_lobe_area,
    uhat_fourier_coeff,
)
from .separatrix import (
    HomoclinicPoint,
    homoclinic_asymptotics,
    homoclinic_state,
    tau_of_v,
)
