"""Complex-order fractional Kelvin-Voigt viscoelasticity toolkit.

The model is sigma = eps + a D^alpha eps + b (D^beta + D^conj(beta)) eps
with a complex differentiation order beta = alpha + iB.  The package
provides the fractional-derivative evaluators, thermodynamic admissibility
checks, zero analysis of the characteristic function, creep-kernel
construction, and relaxation/creep experiments, plus a CSV-emitting CLI.
"""

from .experiments import (
    CurveShape,
    ExperimentConfig,
    MethodComparison,
    SampledSignal,
    classify_curve,
    compare_methods,
    creep,
    regularized_heaviside,
    run_experiment,
    settle_time,
    stress_relaxation,
)
from .fracops import (
    ComplexOrder,
    ExpansionState,
    RealnessError,
    advance_scaled_moments,
    build_expansion_state,
    realness_check,
    rl_deriv_direct,
    rl_deriv_expansion,
    sym_deriv,
)
from .kelvin import (
    ContourSpec,
    KernelTable,
    ZeroSet,
    build_kernel_table,
    char_function,
    char_function_deriv,
    char_function_polar,
    count_zeros,
    creep_kernel_integral,
    creep_kernel_residues,
    find_zeros,
    kernel_zero_set,
    post_invert,
    residue_total_mass,
    solve_strain,
    winding_number,
)
from .numerics import (
    Jet,
    NonFiniteError,
    QuadratureError,
    adaptive_quad,
    complex_gamma,
    jet_eval_nth_derivative,
    ode_integrate,
    principal_power,
)
from .thermo import (
    AdmissibilityReport,
    ModelParams,
    PositivityScan,
    StrongCheck,
    check_strong,
    check_thermo,
    complex_modulus,
    positivity_scan,
    storage_loss,
    strong_threshold,
    thermo_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "ComplexOrder",
    "ContourSpec",
    "CurveShape",
    "ExpansionState",
    "ExperimentConfig",
    "Jet",
    "KernelTable",
    "MethodComparison",
    "ModelParams",
    "NonFiniteError",
    "PositivityScan",
    "QuadratureError",
    "RealnessError",
    "SampledSignal",
    "StrongCheck",
    "ZeroSet",
    "adaptive_quad",
    "advance_scaled_moments",
    "build_expansion_state",
    "build_kernel_table",
    "char_function",
    "char_function_deriv",
    "char_function_polar",
    "check_strong",
    "check_thermo",
    "classify_curve",
    "compare_methods",
    "complex_gamma",
    "complex_modulus",
    "count_zeros",
    "creep",
    "creep_kernel_integral",
    "creep_kernel_residues",
    "find_zeros",
    "jet_eval_nth_derivative",
    "kernel_zero_set",
    "ode_integrate",
    "positivity_scan",
    "post_invert",
    "principal_power",
    "realness_check",
    "regularized_heaviside",
    "residue_total_mass",
    "rl_deriv_direct",
    "rl_deriv_expansion",
    "run_experiment",
    "settle_time",
    "solve_strain",
    "storage_loss",
    "stress_relaxation",
    "strong_threshold",
    "sym_deriv",
    "thermo_threshold",
    "winding_number",
    "__version__",
]
