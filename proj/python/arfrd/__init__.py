"""Bias-aware confidence sets for fuzzy regression discontinuity designs."""

from ._core import (
    ArfrdError,
    ConfidenceSet,
    __version__,
    confidence_set,
    coverage,
    critical_value,
    delta_method,
    folded_cdf,
    p_value,
    rkd_confidence_set,
    rot,
    simulate_sample,
    weight_ratio,
    weights,
)

__all__ = [
    "ArfrdError",
    "ConfidenceSet",
    "__version__",
    "confidence_set",
    "coverage",
    "critical_value",
    "delta_method",
    "folded_cdf",
    "p_value",
    "rkd_confidence_set",
    "rot",
    "simulate_sample",
    "weight_ratio",
    "weights",
]
