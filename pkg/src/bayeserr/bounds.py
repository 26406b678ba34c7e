"""Bias and error bounds for Bayes error estimation from averaged hard labels.

Averaging m hard labels per instance biases the plug-in estimate upward,
because min(q, 1-q) is concave and kinked at q = 1/2. The bounds here
quantify that bias: a per-instance curvature bound, its specialization to
posteriors separated from 1/2, a computable bound that needs only a cap on
the Bayes error itself, and a coarser baseline that grows with the dataset
size. Estimation-error bounds for the full calibrate-then-estimate procedure
round out the module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from .errors import DomainError
from .estimator import as_soft_labels

__all__ = [
    "curvature_weight",
    "curvature_bias_bound",
    "separated_bias_bound",
    "computable_bias_bound",
    "baseline_bias_bound",
    "consistency_bound",
    "isotonic_error_bound",
    "ComputableBound",
    "BiasBoundReport",
]


def curvature_weight(q: float) -> float:
    """Curvature weight q(1-q)/|2q-1| of the pointwise error at posterior q.

    Diverges as q approaches 1/2: instances near the decision boundary are
    the ones whose hard-label averages get clipped by the min. Returns
    math.inf at exactly 1/2.
    """
    q = float(q)
    if not (0.0 <= q <= 1.0):
        raise DomainError(f"posterior must lie in [0, 1], got {q}")
    gap = abs(2.0 * q - 1.0)
    if gap == 0.0:
        return math.inf
    return q * (1.0 - q) / gap


def _curvature_weight_array(q: np.ndarray) -> np.ndarray:
    gap = np.abs(2.0 * q - 1.0)
    with np.errstate(divide="ignore"):
        return np.where(gap > 0.0, q * (1.0 - q) / np.where(gap > 0.0, gap, 1.0), np.inf)


def _sqrt_pi_over_2m(m: int) -> float:
    return math.sqrt(math.pi / (2.0 * m))


def _check_m(m: int) -> int:
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise DomainError(f"the number of hard labels m must be an integer >= 1, got {m}")
    return int(m)


def curvature_bias_bound(soft_labels, m: int) -> float:
    """Bias bound from the per-instance curvature weights.

    Averages min(W(eta_i)/m, sqrt(pi/(2m))) over the given posteriors, where
    W is the curvature weight. The sqrt(pi/(2m)) cap is what saves instances
    at or near eta = 1/2, where W diverges.
    """
    m = _check_m(m)
    eta = as_soft_labels(soft_labels)
    cap = _sqrt_pi_over_2m(m)
    per_instance = np.minimum(_curvature_weight_array(eta) / m, cap)
    return math.fsum(per_instance.tolist()) / eta.size


def separated_bias_bound(c: float, m: int) -> float:
    """Bias bound when every posterior satisfies |eta - 1/2| >= c.

    Equals (1 - 4c^2)/(8cm); zero at c = 1/2 (deterministic labels). Under a
    label-flip corruption with flip probability nu, c = |nu - 1/2|.
    """
    m = _check_m(m)
    c = float(c)
    if not (0.0 < c <= 0.5):
        raise DomainError(f"the separation c must lie in (0, 1/2], got {c}")
    return (1.0 - 4.0 * c * c) / (8.0 * c * m)


class ComputableBound(NamedTuple):
    """Value and minimizing threshold of the computable bias bound."""

    value: float
    argmin_t: float


def _golden_min(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section minimum of a unimodal f on [lo, hi] to |Delta t| < tol."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    t = x1 if f1 <= f2 else x2
    return t, f(t)


def _piece_min(f, lo: float, hi: float) -> tuple[float, float]:
    """Minimum of f over [lo, hi]: log-spaced 200-point bracket, then refine."""
    if hi <= lo:
        return lo, f(lo)
    grid = np.geomspace(lo, hi, 200)
    values = [f(t) for t in grid.tolist()]
    i = int(np.argmin(values))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid.size - 1)]
    return _golden_min(f, a, b, 1e-9)


def computable_bias_bound(E: float, m: int) -> ComputableBound:
    """Bias bound computable from a cap E on the Bayes error alone.

    Minimizes t(1-t)/((1-2t)m) + min(1, E/t) * sqrt(pi/(2m)) over thresholds
    t in (0, 1/2): instances with pointwise error above t are rare when the
    Bayes error is at most E, instances below t have bounded curvature. The
    objective is smooth on each side of t = E, so each side is bracketed on a
    log-spaced grid and refined by golden-section search. The value is
    accurate to 1e-8 relative and never exceeds sqrt(pi/(2m)), the t -> 0
    limit.
    """
    m = _check_m(m)
    E = float(E)
    if not (0.0 < E <= 0.5):
        raise DomainError(f"the Bayes error cap E must lie in (0, 1/2], got {E}")
    cap = _sqrt_pi_over_2m(m)

    def objective(t: float) -> float:
        return t * (1.0 - t) / ((1.0 - 2.0 * t) * m) + min(1.0, E / t) * cap

    t_lo, t_hi = 1e-12, 0.5 - 1e-12
    candidates = []
    if E > t_lo:
        candidates.append(_piece_min(objective, t_lo, min(E, t_hi)))
    if E < t_hi:
        candidates.append(_piece_min(objective, max(E, t_lo), t_hi))
    t_best, v_best = min(candidates, key=lambda tv: tv[1])
    # The infimum as t -> 0+ is exactly the cap; never report more than that.
    if v_best > cap:
        v_best = cap
    return ComputableBound(value=v_best, argmin_t=t_best)


def baseline_bias_bound(n: int, m: int) -> float:
    """Baseline bias bound 1/(2 sqrt(m)) + sqrt(ln(2 n sqrt(m)) / m).

    Grows with the dataset size n, which makes it vacuous in the large-n
    regime the curvature and computable bounds are built for.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"the dataset size n must be an integer >= 1, got {n}")
    m = _check_m(m)
    return 1.0 / (2.0 * math.sqrt(m)) + math.sqrt(math.log(2.0 * n * math.sqrt(m)) / m)


def consistency_bound(n: int, m: int, delta: float, c: float | None = None) -> float:
    """High-probability deviation bound for the hard-label plug-in estimate.

    With probability at least 1 - delta the estimate is within
    sqrt(ln(2/delta)/(2n)) + bias of the true Bayes error, where the bias
    term is sqrt(pi/(2m)) in general or the separated bound when a
    separation c is known.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"the dataset size n must be an integer >= 1, got {n}")
    m = _check_m(m)
    delta = float(delta)
    if not (0.0 < delta < 1.0):
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    deviation = math.sqrt(math.log(2.0 / delta) / (2.0 * n))
    bias = _sqrt_pi_over_2m(m) if c is None else separated_bias_bound(c, m)
    return deviation + bias


def isotonic_error_bound(n: int, delta: float, C: float = 1.0, sigma: float = 0.0) -> float:
    """Rate-shape error bound C (n^(-1/3) + sqrt(ln(1/delta)/n) + sigma).

    Covers the isotonic calibrate-then-estimate procedure on a corrupted,
    order-preserving score; sigma is the score noise amplitude (1/(2 sqrt(m))
    for m-averaged hard labels, 0 for noiseless scores). The constant C is
    not pinned down by the theory; what is testable is the shape, so C is an
    explicit knob with default 1.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"the dataset size n must be an integer >= 1, got {n}")
    delta = float(delta)
    if not (0.0 < delta <= 1.0):
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    if C <= 0.0:
        raise DomainError(f"the rate constant C must be positive, got {C}")
    if sigma < 0.0:
        raise DomainError(f"the noise amplitude sigma must be >= 0, got {sigma}")
    return C * (n ** (-1.0 / 3.0) + math.sqrt(math.log(1.0 / delta) / n) + sigma)


@dataclass(frozen=True)
class BiasBoundReport:
    """Every bias bound whose inputs were available, plus the inputs."""

    parameters: dict[str, Any] = field(default_factory=dict)
    curvature_bound: float | None = None
    separated_bound: float | None = None
    computable_bound: ComputableBound | None = None
    baseline_bound: float | None = None
    consistency: float | None = None
