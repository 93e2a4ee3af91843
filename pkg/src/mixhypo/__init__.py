"""Signed mixtures and the mixed hypoexponential-G distribution families."""

from .base import BaseDistribution, Interval, Kind
from .errors import (
    AccuracyError,
    ConstructionError,
    DomainError,
    InsufficientData,
    MixHypoError,
    MomentDoesNotExist,
    NoConvergence,
    PositivityError,
    SeparationError,
)
from .estimation import FitConfig, FitResult, fit, fit_mle, fit_mom, log_likelihood, sample_moments
from .family import (
    Family,
    FamilySpec,
    HypoexpSpec,
    example_spec,
    family_weights,
    from_rates,
    hypoexp_weights,
    make_family,
    sample_family,
    to_base_rates,
    transform_forward,
)
from .mixture import SignedMixture, ValidationReport, validate_mixture
from .quadrature import quad_integral
from .verify import OracleReport, audit_closed_forms, construction_suite, full_check, ks_distance

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "BaseDistribution",
    "ConstructionError",
    "DomainError",
    "Family",
    "FamilySpec",
    "FitConfig",
    "FitResult",
    "HypoexpSpec",
    "InsufficientData",
    "Interval",
    "Kind",
    "MixHypoError",
    "MomentDoesNotExist",
    "NoConvergence",
    "OracleReport",
    "PositivityError",
    "SeparationError",
    "SignedMixture",
    "ValidationReport",
    "audit_closed_forms",
    "construction_suite",
    "example_spec",
    "family_weights",
    "fit",
    "fit_mle",
    "fit_mom",
    "from_rates",
    "full_check",
    "hypoexp_weights",
    "ks_distance",
    "log_likelihood",
    "make_family",
    "quad_integral",
    "sample_family",
    "sample_moments",
    "to_base_rates",
    "transform_forward",
    "validate_mixture",
]
