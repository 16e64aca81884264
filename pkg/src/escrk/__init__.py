"""Energy-superconvergent explicit Runge-Kutta methods for antisymmetric linear systems."""
from .rk_core import (
    DegenerateCoefficientError,
    EnergyProfile,
    NotStronglyStableError,
    RKCoefficients,
    amplification,
    energy_coefficients,
    energy_profile,
    leading_index,
    solution_order,
    stage_ratios,
    strong_stability_bound,
)
from .catalog import (
    MethodDescriptor,
    catalog,
    family_one_below,
    family_two_below,
    get_method,
    solve_esc,
    taylor_method,
)
from .integrator import (
    InstabilityError,
    LinearSystem,
    SimulationRecord,
    integrate,
    max_stable_step,
    operator_norm_estimate,
    rk_step,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateCoefficientError",
    "EnergyProfile",
    "NotStronglyStableError",
    "RKCoefficients",
    "amplification",
    "energy_coefficients",
    "energy_profile",
    "leading_index",
    "solution_order",
    "stage_ratios",
    "strong_stability_bound",
    "MethodDescriptor",
    "catalog",
    "family_one_below",
    "family_two_below",
    "get_method",
    "solve_esc",
    "taylor_method",
    "InstabilityError",
    "LinearSystem",
    "SimulationRecord",
    "integrate",
    "max_stable_step",
    "operator_norm_estimate",
    "rk_step",
]
