"""Plug-in Bayes error estimation from soft labels.

A soft label is the class-posterior probability eta_i = P(Y=1 | X=x_i) of an
instance, or an approximation of it. The plug-in estimate of the Bayes error
averages the pointwise error min(eta_i, 1 - eta_i) over the dataset. Hard
labels enter by averaging: m independent 0/1 annotations of one instance
become the soft label k/m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError

__all__ = [
    "pointwise_bayes_error",
    "estimate_bayes_error",
    "soft_from_hard",
    "as_soft_labels",
    "ConfidenceInterval",
    "EstimateReport",
]


def as_soft_labels(values: "np.ndarray | list[float]") -> np.ndarray:
    """Validate and return soft labels as a 1-d float array.

    Values must be finite and lie in [0, 1]; the set must be nonempty.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DomainError(f"soft labels must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DomainError("soft labels must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise DomainError("soft labels must be finite")
    if np.min(arr) < 0.0 or np.max(arr) > 1.0:
        raise DomainError("soft labels must lie in [0, 1]")
    return arr


def pointwise_bayes_error(q: float) -> float:
    """Error of the Bayes classifier at a point with posterior q: min(q, 1-q)."""
    q = float(q)
    if not (0.0 <= q <= 1.0):
        raise DomainError(f"posterior must lie in [0, 1], got {q}")
    return min(q, 1.0 - q)


def estimate_bayes_error(soft_labels) -> float:
    """Plug-in Bayes error estimate: the mean of min(eta, 1 - eta).

    Summation is exactly rounded (math.fsum), so the result is deterministic
    and invariant under permutation of the labels. The value always lies in
    [0, 1/2].
    """
    eta = as_soft_labels(soft_labels)
    pointwise = np.minimum(eta, 1.0 - eta)
    return math.fsum(pointwise.tolist()) / eta.size


def soft_from_hard(positives, totals) -> np.ndarray:
    """Average hard labels into soft labels: (k, m) -> k/m.

    `positives` counts the 1-annotations per instance; `totals` is the number
    of annotations per instance (a scalar broadcasts). Requires
    0 <= positives <= totals and totals >= 1.
    """
    pos = np.asarray(positives)
    tot = np.asarray(totals)
    if pos.ndim != 1 or pos.size == 0:
        raise DomainError("positive counts must be a nonempty 1-d array")
    if not (np.issubdtype(pos.dtype, np.integer) and np.issubdtype(tot.dtype, np.integer)):
        raise DomainError("hard label counts must be integers")
    pos, tot = np.broadcast_arrays(pos, tot)
    if np.min(tot) < 1:
        raise DomainError("each instance needs at least one annotation")
    if np.min(pos) < 0 or np.any(pos > tot):
        raise DomainError("positive counts must satisfy 0 <= k <= m")
    return pos / tot


@dataclass(frozen=True)
class ConfidenceInterval:
    """A bootstrap confidence interval for a point estimate."""

    lower: float
    upper: float
    level: float
    method: str
    resamples: int
    seed: int
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.lower <= self.upper:
            raise DomainError(f"interval endpoints out of order: [{self.lower}, {self.upper}]")
        if not (0.0 < self.level < 1.0):
            raise DomainError(f"confidence level must lie in (0, 1), got {self.level}")


@dataclass(frozen=True)
class EstimateReport:
    """A Bayes error estimate with its provenance.

    `method` names the estimation route (clean, hard, corrupted, or a
    calibration family), `parameters` holds route-specific settings, and
    `flags` carries non-fatal warnings raised along the way.
    """

    point_estimate: float
    method: str
    n: int
    ci: ConfidenceInterval | None = None
    parameters: dict[str, Any] = field(default_factory=dict)
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not (0.0 <= self.point_estimate <= 0.5):
            raise DomainError(
                f"a Bayes error estimate must lie in [0, 1/2], got {self.point_estimate}"
            )
        if self.n < 1:
            raise DomainError("an estimate must cover at least one instance")
