"""Cumulant-based moment bounds, exact log-determinant models and simulators."""

from ._cumbound import (
    ConfigError,
    __version__,
    crossings_moments,
    cumulants_from_moments,
    decay_fit,
    enumerate_crossings,
    gaussian_moment,
    model_cumulant,
    model_cumulant_bound,
    model_gap_bound,
    moment_gap_bound,
    moments_from_cumulants,
    polygamma,
    polygamma_bound,
    polygamma_half_sum,
    run_report,
    simulate,
    standardized_moment_exact,
    summarize,
    triangle_moments,
    ustat_variance,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
