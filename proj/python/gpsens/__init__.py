"""Kernel sensitivity analysis for Gaussian process decisions."""

from ._gpsens import (
    ConfigError,
    Error,
    FitError,
    FittedGp,
    Functional,
    HyperPosterior,
    InputError,
    Kernel,
    NumericalError,
    OptimizationError,
    PreconditionError,
    UnsupportedError,
    ValidationError,
    default_grid,
    density_of_kernel,
    fit_mmle,
    frobenius_comparison,
    generate_synthetic,
    kernel_from_density,
    laplace,
    log_marginal_likelihood,
    maximize_spectral,
    noise_matched_draws,
    reassemble_verdict,
    relative_frobenius,
    run,
    sample_hyperparameters,
    spectral_gradient,
)

__version__ = "0.1.0"


def run_file(path):
    """Run a JSON config file; returns (report, exit code)."""
    import json

    with open(path) as f:
        return run(json.load(f))
