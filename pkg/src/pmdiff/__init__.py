"""Nonlinear diffusion filtering for 1D signals and 2D grayscale images.

Perona-Malik style edge-preserving smoothing with explicit, semi-implicit,
original (one-sided) and gradient-regularized schemes, a linear Gaussian
baseline, operator well-posedness checks, and denoising experiment tools.
"""

__version__ = "0.1.0"

from .analysis import (
    FieldStats,
    MetricsLog,
    Report,
    SchemeOutcome,
    add_gaussian_noise,
    continuity_check,
    denoise_experiment,
    field_stats,
    l1_distance,
    variance,
    verify_invariants,
    verify_operator_properties,
)
from .diffusivity import DiffusivityModel, Regime
from .errors import ConfigError, NumericBlowupError, ParseError, SolverError
from .grid import ScalarField, grid_index, linear_index, mirror_sample, neighbors
from .io import read_csv_signal, read_pgm, write_csv_signal, write_pgm
from .operator import (
    DiffusionOperator,
    GaussianKernel,
    apply,
    assemble,
    convolve_gaussian,
    diffusivity_field,
    gradient_magnitude_sq,
    gradient_magnitude_sq_field,
)
from .schemes import (
    SCHEMES,
    SchemeConfig,
    explicit_step,
    gaussian_step,
    heat_closed_form,
    pm_original_step,
    regularized_step,
    run,
    semi_implicit_step,
    stability_bound,
    step_function,
)

__all__ = [
    "__version__",
    "ScalarField", "linear_index", "grid_index", "neighbors", "mirror_sample",
    "DiffusivityModel", "Regime",
    "DiffusionOperator", "GaussianKernel", "gradient_magnitude_sq",
    "gradient_magnitude_sq_field", "diffusivity_field", "assemble", "apply",
    "convolve_gaussian",
    "SCHEMES", "SchemeConfig", "stability_bound", "explicit_step",
    "semi_implicit_step", "pm_original_step", "regularized_step",
    "gaussian_step", "heat_closed_form", "step_function", "run",
    "MetricsLog", "FieldStats", "field_stats", "variance", "l1_distance",
    "add_gaussian_noise", "verify_operator_properties", "verify_invariants",
    "continuity_check", "denoise_experiment", "SchemeOutcome", "Report",
    "read_pgm", "write_pgm", "read_csv_signal", "write_csv_signal",
    "ConfigError", "NumericBlowupError", "SolverError", "ParseError",
]
