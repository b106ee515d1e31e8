"""KONP K-sample tests for right-censored survival data."""

from ._core import (
    IoError,
    ValidationError,
    __version__,
    cauchy_combination,
    generate,
    konp_statistic,
    run_tests,
    scenario_names,
    weighted_logrank,
)

__all__ = [
    "IoError",
    "ValidationError",
    "__version__",
    "cauchy_combination",
    "generate",
    "konp_statistic",
    "run_tests",
    "scenario_names",
    "weighted_logrank",
]
