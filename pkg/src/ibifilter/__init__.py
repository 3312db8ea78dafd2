"""Streaming inverse-Gaussian filtering of inter-beat intervals."""

__version__ = "0.1.0"

from .filter import (
    FilterConfig,
    FilterState,
    FilterTrace,
    IbiFilter,
    InvalidConfig,
    NonPositiveInterval,
    StepOutput,
    filter_estimate,
    filter_init,
    filter_step,
    run_filter,
)
from .igmath import ConjugateParams, DegenerateState, IGParams, ModeVariant

__all__ = [
    "ConjugateParams",
    "DegenerateState",
    "FilterConfig",
    "FilterState",
    "FilterTrace",
    "IGParams",
    "IbiFilter",
    "InvalidConfig",
    "ModeVariant",
    "NonPositiveInterval",
    "StepOutput",
    "filter_estimate",
    "filter_init",
    "filter_step",
    "run_filter",
]
