"""Synthetic data with known posteriors.

Two instance distributions cover the experiments: a two-component isotropic
Gaussian mixture (posterior available in closed form, computed in log space)
and a label-flip world where the posterior takes just two values nu and
1 - nu. Corruptions warp the posterior while preserving order: the beta
corruption is the inverse of a two-parameter beta calibration map, and the
logit-Gaussian corruption adds noise on the logit scale, which breaks order
with a probability that Kendall's tau measures. Everything takes an explicit
seed and draws in a documented order, so outputs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logit

from .errors import DomainError
from .estimator import as_soft_labels
from .rng import as_seed, bernoulli, binomial

__all__ = [
    "GaussianMixtureSpec",
    "CorruptionSpec",
    "posterior_gaussian_mixture",
    "sample_gaussian_mixture",
    "label_flip_posteriors",
    "beta_corruption",
    "invert_beta_corruption",
    "logit_gaussian_corruption",
    "sample_hard_labels",
    "corrupted_hard_label_pipeline",
    "corrupt",
]

CORRUPTION_KINDS = ("identity", "beta", "logit-gaussian")


@dataclass(frozen=True)
class GaussianMixtureSpec:
    """Binary-class isotropic Gaussian mixture.

    Class 1 has prior theta and mean mu1; class 0 has mean mu0; both share
    the isotropic covariance scale * I.
    """

    theta: float
    mu0: tuple[float, ...]
    mu1: tuple[float, ...]
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not (0.0 < self.theta < 1.0):
            raise DomainError(f"the class prior theta must lie in (0, 1), got {self.theta}")
        object.__setattr__(self, "mu0", tuple(float(v) for v in self.mu0))
        object.__setattr__(self, "mu1", tuple(float(v) for v in self.mu1))
        if len(self.mu0) != len(self.mu1) or len(self.mu0) == 0:
            raise DomainError("mu0 and mu1 must be nonempty vectors of equal dimension")
        if not self.scale > 0.0:
            raise DomainError(f"the variance scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class CorruptionSpec:
    """A posterior corruption: identity, beta(a, b), or logit-gaussian.

    The logit-gaussian kind perturbs the beta corruption with N(0, sigma^2)
    noise on the logit scale, so it carries the beta parameters too.
    """

    kind: str
    a: float = 1.0
    b: float = 0.5
    sigma: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in CORRUPTION_KINDS:
            raise DomainError(f"unknown corruption kind '{self.kind}'")
        if self.kind != "identity":
            if not self.a > 0.0:
                raise DomainError(f"the corruption exponent a must be positive, got {self.a}")
            if not (0.0 < self.b < 1.0):
                raise DomainError(f"the corruption midpoint b must lie in (0, 1), got {self.b}")
        if self.kind == "logit-gaussian" and self.sigma < 0.0:
            raise DomainError(f"the noise level sigma must be >= 0, got {self.sigma}")


def posterior_gaussian_mixture(x, spec: GaussianMixtureSpec) -> np.ndarray:
    """Exact posterior P(Y=1 | X=x) for the mixture, one row per instance.

    Computed on the log-odds scale, where the isotropic likelihood ratio is
    (|x-mu0|^2 - |x-mu1|^2) / (2 scale), so nothing overflows far from the
    means.
    """
    X = np.asarray(x, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    d = len(spec.mu0)
    if X.ndim != 2 or X.shape[1] != d:
        raise DomainError(f"instances must be (n, {d}) for this mixture")
    mu0 = np.asarray(spec.mu0)
    mu1 = np.asarray(spec.mu1)
    d0 = np.sum((X - mu0) ** 2, axis=1)
    d1 = np.sum((X - mu1) ** 2, axis=1)
    log_odds = logit(spec.theta) + (d0 - d1) / (2.0 * spec.scale)
    return expit(log_odds)


def sample_gaussian_mixture(spec: GaussianMixtureSpec, n: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Draw n instances; returns (posteriors, instances).

    Draw order: n uniforms pick the components, then an (n, d) block of
    standard normals is shifted and scaled.
    """
    if n < 1:
        raise DomainError(f"need n >= 1 instances, got {n}")
    gen = as_seed(seed).generator()
    d = len(spec.mu0)
    component = gen.random(n) < spec.theta
    X = gen.standard_normal((n, d)) * np.sqrt(spec.scale)
    X += np.where(component[:, None], np.asarray(spec.mu1), np.asarray(spec.mu0))
    return posterior_gaussian_mixture(X, spec), X


def label_flip_posteriors(nu: float, n: int, seed) -> np.ndarray:
    """Posteriors of a label-flip world: nu or 1 - nu, equally likely.

    Instances are never materialized; the two-point posterior distribution
    is all any consumer needs. The exact Bayes error is min(nu, 1 - nu).
    """
    nu = float(nu)
    if not (0.0 <= nu <= 1.0) or nu == 0.5:
        raise DomainError(f"the flip rate nu must lie in [0, 1] and differ from 1/2, got {nu}")
    if n < 1:
        raise DomainError(f"need n >= 1 instances, got {n}")
    gen = as_seed(seed).generator()
    high = gen.random(n) < 0.5
    return np.where(high, 1.0 - nu, nu)


def beta_corruption(p, a: float, b: float) -> "np.ndarray | float":
    """Order-preserving corruption f(p) = sigmoid(logit(p)/a + logit(b)).

    Strictly increasing with f(1/2) = b; a = 1, b = 1/2 is the identity.
    The endpoints map to themselves exactly. This is the inverse of the beta
    calibration map with both slopes a and intercept -a logit(b), so the
    beta family can undo it exactly.
    """
    if not a > 0.0:
        raise DomainError(f"the corruption exponent a must be positive, got {a}")
    if not (0.0 < b < 1.0):
        raise DomainError(f"the corruption midpoint b must lie in (0, 1), got {b}")
    scalar = np.ndim(p) == 0
    eta = as_soft_labels(np.atleast_1d(np.asarray(p, dtype=float)))
    clipped = np.clip(eta, 1e-12, 1.0 - 1e-12)
    out = expit(logit(clipped) / a + logit(b))
    out = np.where(eta == 0.0, 0.0, out)
    out = np.where(eta == 1.0, 1.0, out)
    return float(out[0]) if scalar else out


def invert_beta_corruption(q, a: float, b: float) -> "np.ndarray | float":
    """Inverse of `beta_corruption`: sigmoid(a (logit(q) - logit(b)))."""
    if not a > 0.0:
        raise DomainError(f"the corruption exponent a must be positive, got {a}")
    if not (0.0 < b < 1.0):
        raise DomainError(f"the corruption midpoint b must lie in (0, 1), got {b}")
    scalar = np.ndim(q) == 0
    eta = as_soft_labels(np.atleast_1d(np.asarray(q, dtype=float)))
    clipped = np.clip(eta, 1e-12, 1.0 - 1e-12)
    out = expit(a * (logit(clipped) - logit(b)))
    out = np.where(eta == 0.0, 0.0, out)
    out = np.where(eta == 1.0, 1.0, out)
    return float(out[0]) if scalar else out


def logit_gaussian_corruption(etas, a: float, b: float, sigma: float, seed) -> np.ndarray:
    """Beta corruption plus N(0, sigma^2) noise on the logit scale.

    sigma = 0 returns `beta_corruption` exactly (no draws consumed). Larger
    sigma increasingly breaks the order of the corrupted posteriors, which
    is the failure mode order-based calibration cannot undo.
    """
    if sigma < 0.0:
        raise DomainError(f"the noise level sigma must be >= 0, got {sigma}")
    eta = as_soft_labels(etas)
    base = beta_corruption(eta, a, b)
    if sigma == 0.0:
        return base
    gen = as_seed(seed).generator()
    z = gen.standard_normal(eta.size) * sigma
    out = expit(logit(np.clip(base, 1e-12, 1.0 - 1e-12)) + z)
    out = np.where(eta == 0.0, 0.0, out)
    out = np.where(eta == 1.0, 1.0, out)
    return out


def corrupt(etas, spec: CorruptionSpec, seed=None) -> np.ndarray:
    """Apply a CorruptionSpec to posteriors.

    The logit-gaussian kind draws noise and therefore requires a seed; the
    deterministic kinds ignore it.
    """
    eta = as_soft_labels(etas)
    if spec.kind == "identity":
        return eta.copy()
    if spec.kind == "beta":
        return beta_corruption(eta, spec.a, spec.b)
    if seed is None:
        raise DomainError("the logit-gaussian corruption needs a seed")
    return logit_gaussian_corruption(eta, spec.a, spec.b, spec.sigma, seed)


def sample_hard_labels(etas, m: int, seed) -> np.ndarray:
    """Draw m hard labels per instance; returns the positive counts.

    counts[i] ~ Binomial(m, etas[i]), sampled portably (Bernoulli sums for
    m <= 64, CDF inversion above).
    """
    eta = as_soft_labels(etas)
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise DomainError(f"the number of hard labels m must be an integer >= 1, got {m}")
    gen = as_seed(seed).generator()
    return binomial(gen, int(m), eta)


def corrupted_hard_label_pipeline(
    etas, corruption: CorruptionSpec, m: int | None, seed
) -> tuple[np.ndarray, np.ndarray]:
    """Scores from a corrupted posterior paired with true-posterior labels.

    Returns (scores, labels): the corrupted posterior is sampled into m hard
    labels per instance and averaged (or used directly when m is None), and
    one hard label per instance is drawn from the clean posterior. Three
    child streams, in order: corruption noise, score annotations, labels.
    """
    eta = as_soft_labels(etas)
    root = as_seed(seed)
    corrupted = corrupt(eta, corruption, root.child(0))
    if m is None:
        scores = corrupted
    else:
        if not isinstance(m, (int, np.integer)) or m < 1:
            raise DomainError(f"the number of hard labels m must be an integer >= 1, got {m}")
        counts = binomial(root.child(1).generator(), int(m), corrupted)
        scores = counts / float(m)
    labels = bernoulli(root.child(2).generator(), eta)
    return scores, labels
