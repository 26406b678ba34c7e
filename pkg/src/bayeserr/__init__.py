"""Bayes error estimation from clean, averaged, or corrupted soft labels.

The estimator is the plug-in rule: average min(eta, 1 - eta) over per-instance
class-posterior estimates. The package provides that estimator, calibration
maps that repair corrupted posteriors against hard labels (isotonic,
histogram binning, beta family, Platt scaling), bias bounds for hard-label
averaging, bootstrap confidence intervals, noise-sweep scoring, and
deterministic synthetic data generators, plus a CLI over all of it.
"""

__version__ = "0.1.0"

from .bounds import (
    BiasBoundReport,
    ComputableBound,
    baseline_bias_bound,
    computable_bias_bound,
    consistency_bound,
    curvature_bias_bound,
    curvature_weight,
    isotonic_error_bound,
    separated_bias_bound,
)
from .calibration import (
    BETA_VARIANTS,
    CALIBRATION_FAMILIES,
    CalibratorModel,
    apply,
    beta_fit,
    calibrate_and_estimate,
    fit_calibrator,
    histogram_fit,
    isotonic_fit,
    logistic_fit,
    pav_fit,
    platt_fit,
)
from .errors import BayesErrError, DataError, DomainError, FitError
from .estimator import (
    ConfidenceInterval,
    EstimateReport,
    estimate_bayes_error,
    pointwise_bayes_error,
    soft_from_hard,
)
from .evaluation import (
    FeeBeeReport,
    bootstrap_ci,
    feebee_score,
    fit_loglog_slope,
    inject_label_noise,
    kendall_tau,
    order_break_probability,
)
from .rng import Seed, child_seed, generator
from .synthdata import (
    CorruptionSpec,
    GaussianMixtureSpec,
    beta_corruption,
    corrupt,
    corrupted_hard_label_pipeline,
    invert_beta_corruption,
    label_flip_posteriors,
    logit_gaussian_corruption,
    posterior_gaussian_mixture,
    sample_gaussian_mixture,
    sample_hard_labels,
)

__all__ = [
    "__version__",
    "BayesErrError",
    "DomainError",
    "DataError",
    "FitError",
    "estimate_bayes_error",
    "pointwise_bayes_error",
    "soft_from_hard",
    "EstimateReport",
    "ConfidenceInterval",
    "curvature_weight",
    "curvature_bias_bound",
    "separated_bias_bound",
    "computable_bias_bound",
    "ComputableBound",
    "baseline_bias_bound",
    "consistency_bound",
    "isotonic_error_bound",
    "BiasBoundReport",
    "pav_fit",
    "isotonic_fit",
    "histogram_fit",
    "logistic_fit",
    "beta_fit",
    "platt_fit",
    "fit_calibrator",
    "apply",
    "calibrate_and_estimate",
    "CalibratorModel",
    "BETA_VARIANTS",
    "CALIBRATION_FAMILIES",
    "GaussianMixtureSpec",
    "CorruptionSpec",
    "posterior_gaussian_mixture",
    "sample_gaussian_mixture",
    "label_flip_posteriors",
    "beta_corruption",
    "invert_beta_corruption",
    "logit_gaussian_corruption",
    "corrupt",
    "sample_hard_labels",
    "corrupted_hard_label_pipeline",
    "bootstrap_ci",
    "inject_label_noise",
    "feebee_score",
    "FeeBeeReport",
    "kendall_tau",
    "fit_loglog_slope",
    "order_break_probability",
    "Seed",
    "child_seed",
    "generator",
]
